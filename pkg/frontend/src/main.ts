/** Console entry point: wires socket, input, preset buttons, and renderer. */

import { SocketLike, TeleopClient } from "./client.js";
import { CommandInput } from "./input.js";
import { makePresetCommand, makeVelocityCommand } from "./protocol.js";
import { Ctx2D, SceneRenderer } from "./render.js";

const HEARTBEAT_HZ = 20;

function start(): void {
  const canvas = document.getElementById("scene") as HTMLCanvasElement;
  const banner = document.getElementById("banner") as HTMLElement;
  const buttons = document.getElementById("presets") as HTMLElement;
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("canvas 2d context unavailable");

  const url = new URLSearchParams(window.location.search).get("ws")
    ?? `ws://${window.location.hostname || "localhost"}:8765`;
  const client = new TeleopClient(
    url,
    (u) => new WebSocket(u) as unknown as SocketLike
  );
  const input = new CommandInput();
  const renderer = new SceneRenderer(
    ctx as unknown as Ctx2D, canvas.width, canvas.height
  );

  client.onHello = (hello) => {
    input.velMax = hello.vel_max;
    buttons.innerHTML = "";
    for (const name of [...hello.presets, ""]) {
      const b = document.createElement("button");
      b.textContent = name || "off";
      b.onclick = () => {
        client.view.selectedPreset = name;
        client.sendCommand(makePresetCommand(name));
      };
      buttons.appendChild(b);
    }
  };

  window.addEventListener("keydown", (e) => input.keyDown(e.key));
  window.addEventListener("keyup", (e) => input.keyUp(e.key));
  window.addEventListener("blur", () => input.clear());

  // command heartbeat: zero-velocity setpoints while idle keep the
  // service's hold-on-silence default honest
  setInterval(() => {
    client.sendCommand(makeVelocityCommand(input.vector()));
  }, 1000 / HEARTBEAT_HZ);

  function paint(): void {
    const frame = client.frames.take();
    if (frame !== null) {
      renderer.render(frame, client.view.hello);
    }
    banner.textContent =
      client.view.status === "connected"
        ? ""
        : `connection: ${client.view.status} (commands disabled)`;
    requestAnimationFrame(paint);
  }

  client.connect();
  requestAnimationFrame(paint);
}

window.addEventListener("DOMContentLoaded", start);
