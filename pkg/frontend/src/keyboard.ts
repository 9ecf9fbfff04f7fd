/**
 * Keyboard teleoperation state.
 *
 * Tracks which keys are physically held and resolves them into a button
 * mask that is never contradictory: when both keys of an exclusive pair
 * (forward/back, up/down, grip open/close) are held, the most recently
 * pressed one wins.  Key auto-repeat is irrelevant because the mask is a
 * pure function of the held set; the send loop, not the keyboard, sets the
 * command rate.
 */

import { Buttons } from "./protocol.js";

export const KEY_BINDINGS: Record<string, number> = {
  w: Buttons.FWD,
  s: Buttons.BACK,
  a: Buttons.LEFT,
  d: Buttons.RIGHT,
  q: Buttons.UP,
  e: Buttons.DOWN,
  o: Buttons.GRIP_OPEN,
  c: Buttons.GRIP_CLOSE,
};

const EXCLUSIVE: Array<[number, number]> = [
  [Buttons.FWD, Buttons.BACK],
  [Buttons.UP, Buttons.DOWN],
  [Buttons.GRIP_OPEN, Buttons.GRIP_CLOSE],
];

export class KeyboardState {
  /** Buttons currently held, in press order (oldest first). */
  private held: number[] = [];

  keyDown(key: string): void {
    const button = KEY_BINDINGS[key.toLowerCase()];
    if (button === undefined) {
      return;
    }
    this.held = this.held.filter((b) => b !== button);
    this.held.push(button);
  }

  keyUp(key: string): void {
    const button = KEY_BINDINGS[key.toLowerCase()];
    if (button === undefined) {
      return;
    }
    this.held = this.held.filter((b) => b !== button);
  }

  releaseAll(): void {
    this.held = [];
  }

  /** Current mask with exclusive pairs resolved last-pressed-wins. */
  mask(): number {
    let mask = 0;
    for (const button of this.held) {
      for (const [a, b] of EXCLUSIVE) {
        if (button === a) {
          mask &= ~b; // the newer press silences the older opposite
        } else if (button === b) {
          mask &= ~a;
        }
      }
      mask |= button;
    }
    return mask;
  }
}
