/** Keyboard / on-screen joystick to velocity setpoints.
 *
 * WASD moves the payload in the plane, R/F changes altitude. The produced
 * vector is clamped to the service's velocity limit and sent at a fixed
 * heartbeat; with no input the heartbeat carries a zero setpoint so the
 * service's hold-on-silence default also covers a wedged client.
 */

export class CommandInput {
  private held = new Set<string>();
  private joystick: [number, number] = [0, 0];
  velMax: number;

  constructor(velMax = 0.5) {
    this.velMax = velMax;
  }

  keyDown(key: string): void {
    this.held.add(key.toLowerCase());
  }

  keyUp(key: string): void {
    this.held.delete(key.toLowerCase());
  }

  clear(): void {
    this.held.clear();
    this.joystick = [0, 0];
  }

  setJoystick(x: number, y: number): void {
    this.joystick = [x, y];
  }

  vector(): [number, number, number] {
    let vx = 0;
    let vy = 0;
    let vz = 0;
    if (this.held.has("w")) vx += 1;
    if (this.held.has("s")) vx -= 1;
    if (this.held.has("a")) vy += 1;
    if (this.held.has("d")) vy -= 1;
    if (this.held.has("r")) vz += 1;
    if (this.held.has("f")) vz -= 1;
    vx += this.joystick[0];
    vy += this.joystick[1];
    const scale = this.velMax;
    let v: [number, number, number] = [vx * scale, vy * scale, vz * scale];
    const norm = Math.hypot(v[0], v[1], v[2]);
    if (norm > this.velMax) {
      const k = this.velMax / norm;
      v = [v[0] * k, v[1] * k, v[2] * k];
    }
    return v;
  }

  get idle(): boolean {
    return this.held.size === 0 && this.joystick[0] === 0 && this.joystick[1] === 0;
  }
}
