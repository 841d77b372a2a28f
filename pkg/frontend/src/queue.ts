/** Outbound message buffer for disconnected spells: keeps at most ten
 * messages, dropping the overflow. Any input taken while offline raises
 * the banner until the connection drains the queue. */

const LIMIT = 10;

export class OfflineQueue {
  private items: string[] = [];
  private offlineInputs = 0;

  push(message: string): void {
    this.offlineInputs += 1;
    if (this.items.length < LIMIT) {
      this.items.push(message);
    }
  }

  /** Hand back everything queued, clearing the buffer and the banner. */
  drain(): string[] {
    const pending = this.items;
    this.items = [];
    this.offlineInputs = 0;
    return pending;
  }

  get size(): number {
    return this.items.length;
  }

  get bannerVisible(): boolean {
    return this.offlineInputs > 0;
  }
}
