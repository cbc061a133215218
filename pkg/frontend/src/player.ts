export interface MediaLike {
  currentTime: number;
  duration: number;
  paused: boolean;
  play(): void | Promise<void>;
  pause(): void;
}

/**
 * Thin transport control over whatever plays the video. The browser hands
 * in the real <video> element; tests hand in a stub. All positions clamp
 * to [0, duration] so seeks near the edges stay sane.
 */
export class VideoPanel {
  constructor(readonly media: MediaLike) {}

  toggle(): "paused" | "resumed" {
    if (this.media.paused) {
      void this.media.play();
      return "resumed";
    }
    this.media.pause();
    return "paused";
  }

  seekBy(deltaSeconds: number): number {
    return this.seekTo(this.media.currentTime + deltaSeconds);
  }

  seekTo(seconds: number): number {
    const duration = Number.isFinite(this.media.duration) ? this.media.duration : Infinity;
    const clamped = Math.min(Math.max(seconds, 0), duration);
    this.media.currentTime = clamped;
    return clamped;
  }

  positionMs(): number {
    return Math.round(this.media.currentTime * 1000);
  }
}
