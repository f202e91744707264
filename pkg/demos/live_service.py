"""Round trip against the HTTP API, the same way the web UI talks to it.

Starts the service on a local port, posts a problem document, prints the
synthesized SQL from the JSON response, then shows the error contract on
a malformed request.

Run:  python3 demos/live_service.py
"""

from __future__ import annotations

import json
import socket
import threading
import time

import httpx
import uvicorn

from sqlsynth.service import create_app

with socket.socket() as probe:
    probe.bind(("127.0.0.1", 0))
    port = probe.getsockname()[1]

server = uvicorn.Server(uvicorn.Config(
    create_app(timeout_cap_ms=5_000), host="127.0.0.1", port=port,
    log_level="warning"))
thread = threading.Thread(target=server.run, daemon=True)
thread.start()

base = f"http://127.0.0.1:{port}"
for _ in range(100):
    try:
        if httpx.get(f"{base}/api/health", timeout=1).status_code == 200:
            break
    except httpx.TransportError:
        time.sleep(0.05)
else:
    raise SystemExit("service did not come up")
print(f"service answering on {base}")

problem = json.load(open("demos/problems/shipped_orders.json"))
reply = httpx.post(f"{base}/api/synthesize", json=problem, timeout=30)
body = reply.json()
print(f"\nPOST /api/synthesize -> {reply.status_code}, "
      f"status={body['status']}, {body['elapsed_ms']} ms, "
      f"{body['stats']['sketches_tried']} sketches")
print(body["sql"])

bad = httpx.post(f"{base}/api/synthesize", content=b"definitely not json",
                 headers={"content-type": "application/json"}, timeout=30)
print(f"\nmalformed body -> {bad.status_code}: {bad.json()['error']}")

server.should_exit = True
thread.join(timeout=5)
print("\nservice stopped")
