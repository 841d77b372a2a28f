"""Task scripts, simulated users, and the evaluation loop.

A task is an ordered list of goals (click a point, focus an icon app,
type text, invoke a shortcut).  ``plan_optimal`` produces the exact
shortest action sequence achieving them; ``run`` executes a user model
against the engine -- the perfect user replays the optimal plan, a noisy
user's intended actions are perturbed per its noise model and it replans
from the current state after every deviation, the way a person recovers
with zoom-out.  Reported minimal action counts always come from the
search, never from an estimate.

``actions_taken`` counts user effort plus detector inventions: intended
attempts (misses included -- the action was performed even if nothing was
detected) and spurious detections.
"""

from __future__ import annotations

import json
import math
import random
import statistics
from collections import deque
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Union

from .actions import ACTIONS, ClockTick, UserAction
from .dispatch import (
    KeySequenceOut,
    MockDesktop,
    OutputEvent,
    Session,
    pending_deadline,
)
from .errors import PlanningError
from .hierarchy import ROOT_CURSOR, NavCursor
from .keyboard import BACKSPACE, ENTER, SPACE
from .planner import (
    WAIT_FOR_TICK,
    ClickPlanExtras,
    KeyboardField,
    PlanStep,
    PointerField,
    count_actions,
    keyboard_field,
    leaves_for_key,
    leaves_for_macro,
    leaves_for_pointer_switch,
    pointer_exit_steps,
    pointer_field,
    pointer_targets_centered_in,
)
from .pointer import PointerState, ScreenRect
from .profiles import Profile, layout_for
from .signals import NoiseModel

SCROLL, ZOOM_IN, ZOOM_OUT = UserAction.SCROLL, UserAction.ZOOM_IN, UserAction.ZOOM_OUT

DEFAULT_BUDGET_FACTOR = 50


# --------------------------------------------------------------------------
# task scripts


@dataclass(frozen=True)
class ClickPoint:
    x: int
    y: int
    double: bool = False


@dataclass(frozen=True)
class FocusApp:
    icon: str


@dataclass(frozen=True)
class TypeText:
    text: str


@dataclass(frozen=True)
class InvokeShortcut:
    name: str


Goal = Union[ClickPoint, FocusApp, TypeText, InvokeShortcut]


@dataclass(frozen=True)
class TaskScript:
    name: str
    screen: ScreenRect
    goals: tuple[Goal, ...]
    icons: dict[str, ScreenRect] = field(default_factory=dict)
    initial_app: str = "desktop"
    initial_mode: str = "keyboard"

    def __post_init__(self) -> None:
        for goal in self.goals:
            if isinstance(goal, ClickPoint) and not self.screen.contains(goal.x, goal.y):
                raise PlanningError(f"click target ({goal.x}, {goal.y}) outside screen")
            if isinstance(goal, FocusApp) and goal.icon not in self.icons:
                raise PlanningError(f"goal references unknown icon {goal.icon!r}")


def load_task(path: str | Path) -> TaskScript:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    screen = ScreenRect(0, 0, raw["screen"]["w"], raw["screen"]["h"])
    icons = {
        name: ScreenRect(r["x"], r["y"], r["w"], r["h"])
        for name, r in raw.get("icons", {}).items()
    }
    goals: list[Goal] = []
    for g in raw["goals"]:
        kind = g["type"]
        if kind == "click_point":
            goals.append(ClickPoint(g["x"], g["y"], bool(g.get("double", False))))
        elif kind == "focus_app":
            goals.append(FocusApp(g["icon"]))
        elif kind == "type_text":
            goals.append(TypeText(g["text"]))
        elif kind == "invoke_shortcut":
            goals.append(InvokeShortcut(g["name"]))
        else:
            raise PlanningError(f"unknown goal type {kind!r}")
    return TaskScript(
        name=raw.get("name", Path(path).stem),
        screen=screen,
        goals=tuple(goals),
        icons=icons,
        initial_app=raw.get("initial_app", "desktop"),
        initial_mode=raw.get("initial_mode", "keyboard"),
    )


def build_desktop(script: TaskScript) -> MockDesktop:
    return MockDesktop(script.screen, icons=dict(script.icons), focused_app=script.initial_app)


def _key_for_char(char: str) -> str:
    if char == " ":
        return SPACE
    if char == "\n":
        return ENTER
    return char


_MODIFIERS = {"CTRL", "ALT", "SHIFT", "META"}


# --------------------------------------------------------------------------
# goal tracking


class GoalTracker:
    """Judges goal completion from observable desktop effects.

    Each goal binds to the app focused when it became current
    (``goal_app``); typing progress is measured against that app's buffer
    so a stray focus change is detected and repaired instead of silently
    typing into the wrong window.
    """

    def __init__(self, script: TaskScript, profile: Profile, desktop: MockDesktop):
        self.script = script
        self.profile = profile
        self.desktop = desktop
        self.index = 0
        self.goal_app = desktop.focused_app
        self._clicks_seen = 0
        self._macros: list[str] = []
        self._type_base: str | None = None
        self.refresh()

    def observe(self, outputs: list[OutputEvent]) -> None:
        for event in outputs:
            if isinstance(event, KeySequenceOut):
                self._macros.append(event.label)
        self.refresh()

    def refresh(self) -> None:
        while self.index < len(self.script.goals):
            goal = self.script.goals[self.index]
            if isinstance(goal, TypeText) and self._type_base is None:
                self._type_base = self.desktop.buffer_of(self.goal_app)
            if not self._goal_done(goal):
                break
            self.index += 1
            self.goal_app = self.desktop.focused_app
            self._clicks_seen = len(self.desktop.click_log)
            self._macros.clear()
            self._type_base = None

    @property
    def current_goal(self) -> Goal:
        return self.script.goals[self.index]

    @property
    def all_done(self) -> bool:
        return self.index >= len(self.script.goals)

    def typed_so_far(self) -> str:
        base = self._type_base or ""
        return self.desktop.buffer_of(self.goal_app)[len(base):]

    def click_tolerance(self) -> int:
        depth = self.profile.pointer_max_depth
        return max(
            math.ceil(self.script.screen.w / 2**depth),
            math.ceil(self.script.screen.h / 2**depth),
        )

    def _goal_done(self, goal: Goal) -> bool:
        if isinstance(goal, ClickPoint):
            wanted = "double" if goal.double else "single"
            tolerance = self.click_tolerance()
            return any(
                click.click == wanted
                and max(abs(click.x - goal.x), abs(click.y - goal.y)) <= tolerance
                for click in self.desktop.click_log[self._clicks_seen:]
            )
        if isinstance(goal, FocusApp):
            return self.desktop.focused_app == goal.icon
        if isinstance(goal, TypeText):
            return self.desktop.buffer_of(self.goal_app) == (self._type_base or "") + goal.text
        if isinstance(goal, InvokeShortcut):
            return goal.name in self._macros
        raise PlanningError(f"unknown goal {goal!r}")


# --------------------------------------------------------------------------
# planning


@dataclass
class _SymbolicState:
    """Engine position as the planner walks future goals.

    After any emission or click the engine is in a canonical state, so
    only the first segment needs the live cursor/pointer.
    """

    mode: str
    cursor: NavCursor
    pointer: PointerState | None  # None = canonical reset
    focused: str


class EnginePlanner:
    """Builds shortest plans for a profile's layouts on one screen.

    Distance fields are shared process-wide (see :mod:`mindsim.planner`),
    so replanning during noisy runs is table lookups, not fresh searches.
    """

    def __init__(self, profile: Profile, script: TaskScript):
        self.profile = profile
        self.script = script
        self.screen = script.screen

    def _kb_field(self, layout, targets: frozenset) -> KeyboardField:
        return keyboard_field(layout, targets)

    def _ptr_field(self, targets: frozenset) -> PointerField:
        return pointer_field(self.screen, self.profile.pointer_max_depth, targets)

    # -- public entry

    def plan_remaining(self, state, tracker: GoalTracker) -> deque[PlanStep]:
        steps: list[PlanStep] = []
        sym = _SymbolicState(
            mode=state.mode,
            cursor=state.cursor,
            pointer=state.pointer,
            focused=tracker.desktop.focused_app,
        )
        for position in range(tracker.index, len(tracker.script.goals)):
            goal = tracker.script.goals[position]
            live = position == tracker.index
            goal_app = tracker.goal_app if live else sym.focused
            if isinstance(goal, TypeText):
                typed = tracker.typed_so_far() if live else ""
                self._ensure_focus(steps, sym, goal_app)
                layout = layout_for(self.profile, goal_app)
                for key in _typing_repairs(typed, goal.text):
                    self._emit_key(steps, sym, layout, key)
            elif isinstance(goal, InvokeShortcut):
                self._ensure_focus(steps, sym, goal_app)
                layout = layout_for(self.profile, goal_app)
                targets = leaves_for_macro(layout, goal.name)
                if not targets:
                    raise PlanningError(
                        f"shortcut {goal.name!r} missing from layout for {goal_app!r}"
                    )
                self._emit_targets(steps, sym, layout, targets)
            elif isinstance(goal, ClickPoint):
                # any cell whose center is within the achievable tolerance
                # satisfies the goal; the cell containing the point always is
                targets = pointer_targets_centered_in(
                    self.screen,
                    self.profile.pointer_max_depth,
                    _tolerance_region(self.screen, goal.x, goal.y, tracker.click_tolerance()),
                )
                self._click(steps, sym, targets, "double" if goal.double else "single")
            elif isinstance(goal, FocusApp):
                self._focus_click(steps, sym, goal.icon)
            else:
                raise PlanningError(f"unknown goal {goal!r}")
        return deque(steps)

    # -- segment builders (mutate ``steps`` and ``sym``)

    def _ensure_focus(self, steps, sym: _SymbolicState, app: str) -> None:
        if sym.focused == app:
            return
        if app not in self.script.icons:
            raise PlanningError(f"cannot refocus {app!r}: no icon for it")
        self._focus_click(steps, sym, app)

    def _focus_click(self, steps, sym: _SymbolicState, icon: str) -> None:
        targets = pointer_targets_centered_in(
            self.screen, self.profile.pointer_max_depth, self.script.icons[icon]
        )
        if not targets:
            raise PlanningError(f"icon {icon!r} too small to hit at this depth")
        self._click(steps, sym, targets, "double")
        sym.focused = icon
        sym.cursor = ROOT_CURSOR  # focus change resets keyboard navigation

    def _emit_key(self, steps, sym: _SymbolicState, layout, key: str) -> None:
        targets = leaves_for_key(layout, key)
        if not targets:
            raise PlanningError(f"no key {key!r} in the layout for {sym.focused!r}")
        self._emit_targets(steps, sym, layout, targets)

    def _emit_targets(self, steps, sym: _SymbolicState, layout, targets: frozenset) -> None:
        if sym.mode == "pointer":
            steps.extend(pointer_exit_steps(sym.pointer) if sym.pointer else [ZOOM_OUT])
            sym.mode, sym.cursor, sym.pointer = "keyboard", ROOT_CURSOR, None
        steps.extend(self._kb_field(layout, targets).plan_from(sym.cursor))
        sym.cursor = ROOT_CURSOR  # emits reset to the root

    def _click(self, steps, sym: _SymbolicState, targets: frozenset, kind: str) -> None:
        if sym.mode == "keyboard":
            layout = layout_for(self.profile, sym.focused)
            switch = leaves_for_pointer_switch(layout)
            if not switch:
                raise PlanningError(f"layout for {sym.focused!r} has no pointer switch")
            steps.extend(self._kb_field(layout, switch).plan_from(sym.cursor))
            sym.mode, sym.cursor = "pointer", ROOT_CURSOR
            path: tuple[int, ...] = ()
            highlighted = 0
        elif sym.pointer is not None:  # live, possibly mid-navigation
            if sym.pointer.pending:
                if sym.pointer.quadrants in targets:
                    # already aiming at a valid rect: finish the click
                    steps.extend([ZOOM_IN] if kind == "double" else [WAIT_FOR_TICK])
                    sym.pointer = None
                    return
                steps.append(ZOOM_OUT)  # cancel the unwanted window
            path = sym.pointer.quadrants
            highlighted = sym.pointer.highlighted
        else:
            path = ()
            highlighted = 0
        steps.extend(self._ptr_field(targets).plan_from(path, highlighted))
        steps.extend(ClickPlanExtras(kind).steps())
        sym.pointer = None  # clicks reset the pointer


def _tolerance_region(screen: ScreenRect, x: int, y: int, tolerance: int) -> ScreenRect:
    """Closed Chebyshev ball around the click target, clipped to the screen."""
    left = max(screen.x, x - tolerance)
    top = max(screen.y, y - tolerance)
    right = min(screen.x + screen.w, x + tolerance + 1)
    bottom = min(screen.y + screen.h, y + tolerance + 1)
    return ScreenRect(left, top, right - left, bottom - top)


def _typing_repairs(typed: str, target: str) -> list[str]:
    """Keys turning what was actually typed into the target text."""
    common = 0
    while common < len(typed) and common < len(target) and typed[common] == target[common]:
        common += 1
    keys = [BACKSPACE] * (len(typed) - common)
    keys.extend(_key_for_char(c) for c in target[common:])
    return keys


def _initial_session(script: TaskScript, profile: Profile, desktop: MockDesktop) -> Session:
    session = Session(profile, desktop, app_id=desktop.focused_app)
    if script.initial_mode == "pointer":
        session.state = replace(session.state, mode="pointer")
    return session


def plan_optimal(script: TaskScript, profile: Profile, desktop: MockDesktop) -> list[PlanStep]:
    """Exact shortest step sequence achieving all goals in order.

    Only actions count toward length; :data:`WAIT_FOR_TICK` entries mark
    where the user lets a pending single click resolve.
    """
    session = _initial_session(script, profile, desktop)
    tracker = GoalTracker(script, profile, desktop)
    if tracker.all_done:
        return []
    planner = EnginePlanner(profile, script)
    return list(planner.plan_remaining(session.state, tracker))


# --------------------------------------------------------------------------
# user models and execution


@dataclass(frozen=True)
class Latency:
    """Per-action delay: constant, or log-normal of ln-milliseconds."""

    kind: str  # "const" | "lognormal"
    value: float = 2000.0
    sigma: float = 0.0

    def draw(self, rng: random.Random) -> int:
        if self.kind == "const":
            return max(1, int(self.value))
        return max(1, round(rng.lognormvariate(self.value, self.sigma)))


@dataclass(frozen=True)
class UserModel:
    kind: str = "perfect"  # "perfect" | "noisy"
    noise: NoiseModel | None = None
    latency: Latency = Latency("const", 2000.0)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("perfect", "noisy"):
            raise PlanningError(f"unknown user model {self.kind!r}")
        if self.kind == "noisy" and self.noise is None:
            object.__setattr__(self, "noise", NoiseModel.zero())


@dataclass(frozen=True)
class TaskMetrics:
    task: str
    actions_taken: int
    minimal_actions: int
    excess: int
    duration_ms: int
    success: bool
    seed: int


def run(
    script: TaskScript,
    model: UserModel,
    profile: Profile,
    budget_factor: int = DEFAULT_BUDGET_FACTOR,
) -> TaskMetrics:
    """Execute one simulated user against a fresh engine and desktop.

    Deterministic for a given (script, model, seed): all randomness comes
    from one seeded generator, all time from drawn latencies and the
    click-window deadline.
    """
    minimal = count_actions(plan_optimal(script, profile, build_desktop(script)))
    desktop = build_desktop(script)
    session = _initial_session(script, profile, desktop)
    tracker = GoalTracker(script, profile, desktop)
    planner = EnginePlanner(profile, script)

    rng = random.Random(model.seed)
    noise = model.noise if model.kind == "noisy" else None
    budget = max(1, minimal) * budget_factor
    attempts = 0
    spurious = 0
    now = 0
    plan: deque[PlanStep] = deque()

    def metrics(success: bool) -> TaskMetrics:
        taken = attempts + spurious
        return TaskMetrics(
            script.name, taken, minimal, taken - minimal, now, success, model.seed
        )

    try:
        while not tracker.all_done:
            if attempts + spurious >= budget:
                return metrics(False)
            if not plan:
                plan = planner.plan_remaining(session.state, tracker)
            step = plan.popleft()

            if step == WAIT_FOR_TICK:
                deadline = pending_deadline(session.state)
                if deadline is None:
                    plan.clear()  # stale plan: the window is no longer open
                    continue
                now = max(now, deadline)
                tracker.observe(session.feed(ClockTick(deadline)))
                continue

            intended: UserAction = step
            attempts += 1
            now = _next_time(now, model.latency.draw(rng), session)

            if noise is None:
                actual: UserAction | None = intended
                fires = 0
                deviated = False
            else:
                missed = rng.random() < noise.miss_rate
                actual = _confuse(rng, noise, intended)
                fires = _poisson_draw(rng, noise.false_fire_rate)
                if missed:
                    actual = None
                deviated = missed or actual is not intended or fires > 0

            # If the click window lapses before this action lands, the
            # engine resolves a single click first; the plan is stale.
            deadline = pending_deadline(session.state)
            if deadline is not None and now >= deadline:
                deviated = True

            if actual is not None:
                tracker.observe(session.feed_action(actual, now))
            for _ in range(fires):
                spurious += 1
                now += 1
                tracker.observe(session.feed_action(ACTIONS[rng.randrange(3)], now))

            if deviated:
                plan.clear()
    except PlanningError:
        # A stray click painted the engine into an unrecoverable corner
        # (e.g. focus lost to an app without an icon).
        return metrics(False)

    tracker.observe(session.flush())
    return metrics(True)


def _next_time(now: int, latency: int, session: Session) -> int:
    """Timestamp of the next intended action.

    During a click window the user is racing the blink, so the action is
    taken before the deadline when the drawn latency would overshoot it.
    """
    deadline = pending_deadline(session.state)
    target = now + latency
    if deadline is not None and target >= deadline:
        target = max(now + 1, deadline - 1)
    return target


def _confuse(rng: random.Random, noise: NoiseModel, intended: UserAction) -> UserAction:
    row = noise.confusion[ACTIONS.index(intended)]
    draw = rng.random()
    cumulative = 0.0
    for action, probability in zip(ACTIONS, row):
        cumulative += probability
        if draw < cumulative:
            return action
    return ACTIONS[-1]


def _poisson_draw(rng: random.Random, rate: float) -> int:
    if rate <= 0.0:
        return 0
    limit = math.exp(-rate)
    count, product = 0, rng.random()
    while product > limit:
        count += 1
        product *= rng.random()
    return count


# --------------------------------------------------------------------------
# aggregation


@dataclass(frozen=True)
class AggregateReport:
    task: str
    runs: int
    mean_actions: float
    std_actions: float
    mean_excess: float
    std_excess: float
    mean_duration_ms: float
    std_duration_ms: float
    success_rate: float
    r_squared: float | None
    projected_human_s: float

    def to_json(self) -> str:
        payload = {name: getattr(self, name) for name in self.__dataclass_fields__}
        return json.dumps(payload, sort_keys=True)

    def to_tsv(self) -> str:
        names = list(self.__dataclass_fields__)
        cells = []
        for name in names:
            value = getattr(self, name)
            cells.append(f"{value:.4f}" if isinstance(value, float) else str(value))
        return "\t".join(names) + "\n" + "\t".join(cells)


def summarize(metrics: list[TaskMetrics], per_action_s: float = 2.0) -> AggregateReport:
    """Aggregate a batch of runs.

    ``projected_human_s`` scales mean actions by an assumed per-action
    latency; it is a consistency projection, not a measurement.  The
    duration/actions correlation is undefined (None) for fewer than two
    runs or zero variance.
    """
    if not metrics:
        raise PlanningError("nothing to summarize")
    actions = [m.actions_taken for m in metrics]
    excess = [m.excess for m in metrics]
    durations = [m.duration_ms for m in metrics]
    r_squared: float | None = None
    if len(metrics) >= 2:
        try:
            r_squared = statistics.correlation(durations, actions) ** 2
        except statistics.StatisticsError:
            r_squared = None
    return AggregateReport(
        task=metrics[0].task,
        runs=len(metrics),
        mean_actions=statistics.fmean(actions),
        std_actions=statistics.pstdev(actions),
        mean_excess=statistics.fmean(excess),
        std_excess=statistics.pstdev(excess),
        mean_duration_ms=statistics.fmean(durations),
        std_duration_ms=statistics.pstdev(durations),
        success_rate=sum(m.success for m in metrics) / len(metrics),
        r_squared=r_squared,
        projected_human_s=statistics.fmean(actions) * per_action_s,
    )
