"""Threshold/debounce detection over raw intensity streams, plus a
deterministic signal synthesizer for driving the engine in tests and
benchmarks.

Detection is edge-triggered: an event fires when a channel's intensity
crosses its threshold upward (previous sample below, current at or above).
A sustained high level therefore produces exactly one event.  Each channel
has a refractory period (``debounce_ms``) measured from the last *emitted*
event on that channel.

The synthesizer uses ``random.Random`` (Mersenne Twister), which produces
identical draws for a given seed on every platform and Python version we
support; simulations are reproducible bit-for-bit.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .actions import ACTIONS, UserAction, UserActionEvent
from .errors import ConfigError, TraceError

CONFUSION_EPS = 1e-9


@dataclass(frozen=True)
class RawSignalSample:
    timestamp_ms: int
    channel: str
    intensity: float


@dataclass(frozen=True)
class DetectionConfig:
    """Per-channel thresholds and the channel -> action mapping."""

    channel_map: dict[str, UserAction]
    thresholds: dict[str, float]
    debounce_ms: int = 300

    def __post_init__(self) -> None:
        if len(self.channel_map) != 3:
            raise ConfigError(f"expected exactly 3 channels, got {len(self.channel_map)}")
        if set(self.channel_map.values()) != set(ACTIONS):
            raise ConfigError("channel map must cover scroll, zoom_in and zoom_out exactly once")
        if set(self.thresholds) != set(self.channel_map):
            raise ConfigError("thresholds must name exactly the mapped channels")
        for channel, threshold in self.thresholds.items():
            if not 0.0 < threshold <= 1.0:
                raise ConfigError(f"threshold for {channel!r} must be in (0, 1], got {threshold}")
        if self.debounce_ms < 0:
            raise ConfigError("debounce_ms must be non-negative")

    def channel_for(self, action: UserAction) -> str:
        for channel, mapped in self.channel_map.items():
            if mapped is action:
                return channel
        raise ConfigError(f"no channel mapped to {action}")


#: Channel naming used by the synthesizer and the bundled profile.
DEFAULT_DETECTION = DetectionConfig(
    channel_map={"ch1": UserAction.SCROLL, "ch2": UserAction.ZOOM_IN, "ch3": UserAction.ZOOM_OUT},
    thresholds={"ch1": 0.6, "ch2": 0.6, "ch3": 0.6},
    debounce_ms=300,
)


@dataclass(frozen=True)
class NoiseModel:
    """Detection imperfections applied to intended actions.

    ``confusion`` rows/columns follow the :data:`~mindsim.actions.ACTIONS`
    order; row i gives the probability that intended action i is detected
    as each action.  ``false_fire_rate`` is the expected number of spurious
    detections per intended action (Poisson draws).
    """

    miss_rate: float = 0.0
    confusion: tuple[tuple[float, float, float], ...] = (
        (1.0, 0.0, 0.0),
        (0.0, 1.0, 0.0),
        (0.0, 0.0, 1.0),
    )
    false_fire_rate: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.miss_rate <= 1.0:
            raise ConfigError(f"miss_rate must be in [0, 1], got {self.miss_rate}")
        if self.false_fire_rate < 0.0:
            raise ConfigError("false_fire_rate must be non-negative")
        if len(self.confusion) != 3:
            raise ConfigError("confusion matrix must be 3x3")
        for row in self.confusion:
            if len(row) != 3:
                raise ConfigError("confusion matrix must be 3x3")
            if any(not 0.0 <= p <= 1.0 for p in row):
                raise ConfigError("confusion probabilities must be in [0, 1]")
            if abs(sum(row) - 1.0) > CONFUSION_EPS:
                raise ConfigError(f"confusion row {row} does not sum to 1")

    @classmethod
    def zero(cls, seed: int = 0) -> "NoiseModel":
        return cls(seed=seed)

    @classmethod
    def confusion_rate(cls, rate: float, seed: int = 0) -> "NoiseModel":
        """Symmetric confusion: each intended action is misread with
        probability ``rate``, split evenly over the other two actions."""
        if not 0.0 <= rate <= 1.0:
            raise ConfigError(f"confusion rate must be in [0, 1], got {rate}")
        off = rate / 2.0
        rows = tuple(
            tuple(1.0 - rate if i == j else off for j in range(3)) for i in range(3)
        )
        return cls(confusion=rows, seed=seed)

    @property
    def is_zero(self) -> bool:
        return (
            self.miss_rate == 0.0
            and self.false_fire_rate == 0.0
            and all(row[i] == 1.0 for i, row in enumerate(self.confusion))
        )


def decode_stream(
    samples: Iterable[RawSignalSample], config: DetectionConfig
) -> list[UserActionEvent]:
    """Turn an ordered intensity stream into detected action events.

    Channels start at an implicit baseline of 0.0, so a stream whose first
    sample is already at threshold fires immediately.
    """
    previous: dict[str, float] = {}
    last_event_at: dict[str, int] = {}
    events: list[UserActionEvent] = []
    last_ts: int | None = None

    for sample in samples:
        if sample.channel not in config.channel_map:
            raise ConfigError(f"unknown channel {sample.channel!r}")
        if not 0.0 <= sample.intensity <= 1.0:
            raise TraceError(f"intensity out of range at t={sample.timestamp_ms}")
        if last_ts is not None and sample.timestamp_ms < last_ts:
            raise TraceError(
                f"timestamps not ordered: {sample.timestamp_ms} after {last_ts}"
            )
        last_ts = sample.timestamp_ms

        threshold = config.thresholds[sample.channel]
        prev = previous.get(sample.channel, 0.0)
        previous[sample.channel] = sample.intensity

        if prev >= threshold or sample.intensity < threshold:
            continue  # not an upward crossing
        last = last_event_at.get(sample.channel)
        if last is not None and sample.timestamp_ms - last < config.debounce_ms:
            continue  # within the refractory period
        last_event_at[sample.channel] = sample.timestamp_ms
        events.append(
            UserActionEvent(config.channel_map[sample.channel], sample.timestamp_ms)
        )
    return events


def _poisson(rng: random.Random, rate: float) -> int:
    # Knuth's inverse-transform method; exact for the small rates used here.
    if rate <= 0.0:
        return 0
    limit = 2.718281828459045 ** (-rate)
    count, product = 0, rng.random()
    while product > limit:
        count += 1
        product *= rng.random()
    return count


def simulate_signals(
    intended: Sequence[UserAction],
    noise: NoiseModel,
    inter_action_ms: int,
    config: DetectionConfig = DEFAULT_DETECTION,
) -> list[RawSignalSample]:
    """Synthesize a raw stream that decodes back to ``intended`` under a
    zero-noise model.

    One pulse (a 0.0 sample followed by a 1.0 sample one ms later) is laid
    down per detection, so the result round-trips through
    :func:`decode_stream` for any valid thresholds as long as
    ``inter_action_ms`` exceeds the decoder's debounce window.
    """
    if inter_action_ms <= 0:
        raise ConfigError("inter_action_ms must be positive")
    rng = random.Random(noise.seed)
    pulses: list[tuple[int, str]] = []

    for index, action in enumerate(intended):
        if action not in ACTIONS:
            raise ConfigError(f"unknown action {action!r}")
        at = (index + 1) * inter_action_ms
        missed = rng.random() < noise.miss_rate
        row = noise.confusion[ACTIONS.index(action)]
        detected = _pick(rng, row)
        spurious = _poisson(rng, noise.false_fire_rate)
        if not missed:
            pulses.append((at, config.channel_for(detected)))
        for extra in range(spurious):
            offset = inter_action_ms // 2 + 2 * extra
            channel = config.channel_for(ACTIONS[rng.randrange(3)])
            pulses.append((at + offset, channel))

    samples: list[RawSignalSample] = []
    for at, channel in sorted(pulses):
        samples.append(RawSignalSample(at - 1, channel, 0.0))
        samples.append(RawSignalSample(at, channel, 1.0))
    samples.sort(key=lambda s: (s.timestamp_ms, s.channel, s.intensity))
    return samples


def _pick(rng: random.Random, row: Sequence[float]) -> UserAction:
    draw = rng.random()
    cumulative = 0.0
    for action, probability in zip(ACTIONS, row):
        cumulative += probability
        if draw < cumulative:
            return action
    return ACTIONS[-1]


def write_trace(samples: Iterable[RawSignalSample], path: str | Path) -> None:
    """Write ``timestamp_ms<TAB>channel<TAB>intensity`` lines."""
    lines = [f"{s.timestamp_ms}\t{s.channel}\t{s.intensity:g}" for s in samples]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def read_trace(path: str | Path) -> list[RawSignalSample]:
    samples: list[RawSignalSample] = []
    for number, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise TraceError(f"{path}:{number}: expected 3 tab-separated fields")
        try:
            samples.append(RawSignalSample(int(parts[0]), parts[1], float(parts[2])))
        except ValueError as exc:
            raise TraceError(f"{path}:{number}: {exc}") from exc
    return samples
