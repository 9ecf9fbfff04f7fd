import { describe, expect, it } from "vitest";

import { KeyboardState, KEY_BINDINGS } from "../src/keyboard.js";
import { Buttons, isContradictory } from "../src/protocol.js";

describe("KeyboardState", () => {
  it("maps bindings to buttons", () => {
    const kb = new KeyboardState();
    kb.keyDown("w");
    expect(kb.mask()).toBe(Buttons.FWD);
    kb.keyUp("w");
    expect(kb.mask()).toBe(0);
  });

  it("ignores unbound keys", () => {
    const kb = new KeyboardState();
    kb.keyDown("x");
    expect(kb.mask()).toBe(0);
  });

  it("last-pressed wins on an exclusive pair", () => {
    const kb = new KeyboardState();
    kb.keyDown("w");
    kb.keyDown("s"); // opposite while still holding w
    expect(kb.mask()).toBe(Buttons.BACK);
    kb.keyUp("s"); // the older key takes over again
    expect(kb.mask()).toBe(Buttons.FWD);
  });

  it("resolves the grip pair the same way", () => {
    const kb = new KeyboardState();
    kb.keyDown("o");
    kb.keyDown("c");
    expect(kb.mask()).toBe(Buttons.GRIP_CLOSE);
  });

  it("combines independent axes", () => {
    const kb = new KeyboardState();
    kb.keyDown("w");
    kb.keyDown("a");
    kb.keyDown("q");
    expect(kb.mask()).toBe(Buttons.FWD | Buttons.LEFT | Buttons.UP);
  });

  it("never produces a contradictory mask under key fuzzing", () => {
    const keys = Object.keys(KEY_BINDINGS);
    const kb = new KeyboardState();
    let seed = 12345;
    const rand = () => (seed = (seed * 1103515245 + 12345) & 0x7fffffff) / 0x7fffffff;
    for (let i = 0; i < 5000; i++) {
      const key = keys[Math.floor(rand() * keys.length)]!;
      if (rand() < 0.5) {
        kb.keyDown(key);
      } else {
        kb.keyUp(key);
      }
      expect(isContradictory(kb.mask())).toBe(false);
    }
  });

  it("releaseAll clears the mask", () => {
    const kb = new KeyboardState();
    kb.keyDown("w");
    kb.keyDown("a");
    kb.releaseAll();
    expect(kb.mask()).toBe(0);
  });
});
