/** Gateway connection: sends bound actions, surfaces parsed frames, and
 * buffers input while disconnected. The socket implementation is
 * injectable so the logic runs under node tests unchanged. */

import { OfflineQueue } from "./queue.js";
import { actionMessage, parseFrame } from "./protocol.js";
import type { ActionName, ServerFrame, Snapshot } from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: "open" | "close" | "error", listener: () => void): void;
  addEventListener(type: "message", listener: (event: { data: unknown }) => void): void;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ClientEvents {
  onSnapshot?: (snapshot: Snapshot) => void;
  onFrame?: (frame: ServerFrame) => void;
  onStatus?: (connected: boolean) => void;
}

export class GatewayClient {
  private socket: SocketLike | null = null;
  private queue = new OfflineQueue();
  private connected = false;
  /** Action locally echoed until the next snapshot confirms it. */
  echo: ActionName | null = null;
  lastSeq = 0;

  constructor(
    private readonly url: string,
    private readonly events: ClientEvents,
    private readonly factory: SocketFactory,
  ) {}

  connect(): void {
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.addEventListener("open", () => {
      this.connected = true;
      this.events.onStatus?.(true);
      for (const message of this.queue.drain()) socket.send(message);
    });
    socket.addEventListener("close", () => {
      this.connected = false;
      this.events.onStatus?.(false);
    });
    socket.addEventListener("error", () => {
      this.connected = false;
      this.events.onStatus?.(false);
    });
    socket.addEventListener("message", (event) => {
      const frame = parseFrame(String(event.data));
      if (!frame) return;
      if (frame.type === "snapshot") {
        if (frame.seq <= this.lastSeq) return; // stale frame: dropped
        this.lastSeq = frame.seq;
        this.echo = null; // the engine has spoken; stop echoing
        this.events.onSnapshot?.(frame);
      }
      this.events.onFrame?.(frame);
    });
  }

  sendAction(action: ActionName): void {
    const message = actionMessage(action);
    this.echo = action;
    if (this.connected && this.socket) {
      this.socket.send(message);
    } else {
      this.queue.push(message);
    }
  }

  get offlineBanner(): boolean {
    return this.queue.bannerVisible;
  }

  get isConnected(): boolean {
    return this.connected;
  }

  close(): void {
    this.socket?.close();
  }
}
