/** Sound cues: engine event names map to asset ids via the profile's
 * sound table (delivered in every snapshot). Unmapped events stay silent;
 * muting wins over everything. */

export type PlayFn = (assetId: string) => void;

export class CuePlayer {
  muted = false;

  constructor(private readonly play: PlayFn) {}

  trigger(event: string, sounds: Record<string, string>): boolean {
    if (this.muted) return false;
    const asset = sounds[event];
    if (!asset) return false;
    this.play(asset);
    return true;
  }
}

/** Default browser player; assets resolve relative to ./sounds/. */
export function audioPlayer(): PlayFn {
  return (assetId: string) => {
    const audio = new Audio(`sounds/${assetId}`);
    void audio.play().catch(() => {
      /* autoplay may be blocked until first interaction; cues are optional */
    });
  };
}
