// Console state: server-authoritative snapshots plus connection bookkeeping.
// The console never simulates physics; it renders the last tick_state and
// treats anything older than the staleness limit as untrustworthy.

import type { Message, SessionInfo, TickState } from "./protocol.js";

export const STALE_AFTER_MS = 500;

export interface ConsoleState {
  connected: boolean;
  info: SessionInfo | null;
  tick: TickState | null;
  lastTickWallMs: number;
  decodeErrors: number;
  lastSeq: number;
}

export function initialState(): ConsoleState {
  return {
    connected: false,
    info: null,
    tick: null,
    lastTickWallMs: -Infinity,
    decodeErrors: 0,
    lastSeq: -1,
  };
}

export function applyConnection(state: ConsoleState, connected: boolean): ConsoleState {
  return { ...state, connected, ...(connected ? {} : { lastTickWallMs: -Infinity }) };
}

/** Fold one decoded server message (or a decode failure) into the state. */
export function applyMessage(
  state: ConsoleState,
  msg: Message | null,
  nowMs: number,
): ConsoleState {
  if (msg === null) {
    return { ...state, decodeErrors: state.decodeErrors + 1 };
  }
  if (msg.type === "session_info") {
    // A fresh info frame (connect or reset) restarts the stream.
    return {
      ...state,
      info: msg,
      tick: null,
      lastSeq: msg.seq,
      lastTickWallMs: nowMs,
    };
  }
  if (msg.type === "tick_state") {
    if (msg.seq <= state.lastSeq) {
      return state; // out-of-order or duplicate: keep the newer snapshot
    }
    return { ...state, tick: msg, lastSeq: msg.seq, lastTickWallMs: nowMs };
  }
  return state; // client-direction message echoed back: ignore
}

export function isStale(state: ConsoleState, nowMs: number): boolean {
  if (!state.connected) return true;
  if (state.tick === null) return false; // nothing to be stale about yet
  return nowMs - state.lastTickWallMs > STALE_AFTER_MS;
}
