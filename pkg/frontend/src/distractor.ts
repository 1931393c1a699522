// Mental-arithmetic distractor widget: a deterministic cycle of two-operand
// problems. Solving them is deliberately placed in a corner panel mapped to
// the distractor display object, so working on them pulls the gaze off the
// surgical field and the server-side attention level falls on its own.

import { mulberry32 } from "./input.js";

export interface Prompt {
  index: number;
  text: string;
  answer: number;
}

export function promptAt(seed: number, index: number): Prompt {
  const rand = mulberry32((seed ^ (index * 0x9e3779b9)) >>> 0);
  const a = 11 + Math.floor(rand() * 79);
  const b = 12 + Math.floor(rand() * 78);
  const subtract = rand() < 0.5;
  if (subtract) {
    const hi = Math.max(a, b);
    const lo = Math.min(a, b);
    return { index, text: `${hi} − ${lo} = ?`, answer: hi - lo };
  }
  return { index, text: `${a} + ${b} = ?`, answer: a + b };
}

export class DistractorWidget {
  readonly seed: number;
  active = false;
  solved = 0;
  private index = 0;

  constructor(seed: number) {
    this.seed = seed;
  }

  toggle(): void {
    this.active = !this.active;
  }

  get prompt(): Prompt {
    return promptAt(this.seed, this.index);
  }

  /** Returns true when the submitted answer was correct. */
  submit(answer: number): boolean {
    if (!this.active) return false;
    if (answer === this.prompt.answer) {
      this.solved += 1;
      this.index += 1;
      return true;
    }
    return false;
  }
}
