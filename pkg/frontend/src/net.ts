// WebSocket client with capped-backoff reconnect.

import { decode, encode, SequenceCounter, type ClientMessage, type Message } from "./protocol.js";

export interface ClientHandlers {
  onMessage: (msg: Message | null) => void; // null = malformed frame
  onStatus: (connected: boolean) => void;
}

export class ConsoleClient {
  private url: string;
  private handlers: ClientHandlers;
  private ws: WebSocket | null = null;
  private closed = false;
  private retryMs = 500;
  private seq = new SequenceCounter();

  constructor(url: string, handlers: ClientHandlers) {
    this.url = url;
    this.handlers = handlers;
    this.open();
  }

  private open(): void {
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.retryMs = 500;
      this.handlers.onStatus(true);
    };
    ws.onmessage = (ev) => {
      const data = typeof ev.data === "string" ? ev.data : "";
      this.handlers.onMessage(decode(data));
    };
    ws.onclose = () => {
      this.handlers.onStatus(false);
      if (!this.closed) {
        setTimeout(() => this.open(), this.retryMs);
        this.retryMs = Math.min(this.retryMs * 2, 5000);
      }
    };
    ws.onerror = () => {
      // onclose drives the reconnect
    };
  }

  get connected(): boolean {
    return this.ws !== null && this.ws.readyState === WebSocket.OPEN;
  }

  send(msg: ClientMessage): void {
    if (this.connected) {
      this.ws!.send(encode(this.seq.stamp(msg)));
    }
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}
