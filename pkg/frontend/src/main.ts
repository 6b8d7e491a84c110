// Boot: connect the controller to a WebSocket with reconnect backoff and
// wire the DOM renderer.

import { SessionController } from "./controller.js";
import { bindKeyboard, chime, renderAll } from "./dom.js";

const params = new URLSearchParams(location.search);
const url = params.get("ws") ?? "ws://127.0.0.1:8765";

const controller = new SessionController(Date.now, (signal) => {
  if (signal === "chime") chime();
  renderAll(controller);
});

let backoff = 500;

function connect(): void {
  const socket = new WebSocket(url);
  socket.onopen = () => {
    backoff = 500;
    controller.attach({ send: (line) => socket.send(line) });
  };
  socket.onmessage = (event) => controller.onLine(String(event.data));
  socket.onclose = () => {
    controller.detach();
    setTimeout(connect, backoff);
    backoff = Math.min(backoff * 2, 8000);
  };
  socket.onerror = () => socket.close();
}

bindKeyboard(controller);
renderAll(controller);
connect();
