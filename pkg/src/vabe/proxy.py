"""Transformation proxy: a TCP service holding transform keys.

Protocol: newline-delimited JSON, one request per line, one response
line each. Binary fields are base64, key ids are hex.

    {"op": "register_tk", "key_id": <hex>, "tk_bytes": <b64>}
        -> {"ok": true}
    {"op": "transform", "key_id": <hex>, "ct_bytes": <b64>}
        -> {"ok": true, "ct_prime_bytes": <b64>}
        -> {"ok": false, "error_code": "UNKNOWN_KEY" | "NOT_SATISFIED"
                                      | "MALFORMED", "message": ...}

Malformed requests get an error response but keep the connection open.

Besides the honest mode the server can impersonate misbehaving proxies
for testing the client-side verification: "replay" returns the first
transform response forever, "garble" randomizes the partial decryption,
"swap" exchanges the two partial decryptions, and "stale" silently
transforms the first ciphertext it ever saw instead of the one asked
for. A verifying client must reject all of them whenever the response
does not match the ciphertext it asked about.
"""

from __future__ import annotations

import base64
import binascii
import json
import socket
import socketserver
import threading

from .envelope import (
    decode_ciphertext,
    decode_transform_key,
    decode_transformed,
    encode_ciphertext,
    encode_transform_key,
    encode_transformed,
)
from .errors import MalformedEncoding, NotSatisfied, ProxyError
from .groups import random_gt
from .vout import TransformedCiphertext, transform

MODES = ("honest", "replay", "garble", "swap", "stale")
_MAX_LINE = 64 * 1024 * 1024


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        while True:
            try:
                line = self.rfile.readline(_MAX_LINE + 1)
            except (ConnectionError, OSError):
                return
            if not line:
                return
            if len(line) > _MAX_LINE:
                self._send({"ok": False, "error_code": "MALFORMED",
                            "message": "request line too long"})
                return
            try:
                self._send(self.server.dispatch(line))
            except (ConnectionError, OSError):
                return

    def _send(self, obj: dict):
        self.wfile.write(json.dumps(obj).encode("utf-8") + b"\n")
        self.wfile.flush()


def _err(code: str, message: str) -> dict:
    return {"ok": False, "error_code": code, "message": message}


class ProxyServer(socketserver.ThreadingTCPServer):
    """Keyed transformation service; see module docstring for the protocol."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, listen_addr, pp, mode: str = "honest"):
        if mode not in MODES:
            raise ValueError(f"unknown proxy mode {mode!r}; pick one of {MODES}")
        super().__init__(tuple(listen_addr), _Handler)
        self.pp = pp
        self.mode = mode
        self._lock = threading.Lock()
        self._keys = {}
        self._replay_response = None
        self._stale_ct = None

    # one request line -> one response dict
    def dispatch(self, line: bytes) -> dict:
        try:
            req = json.loads(line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            return _err("MALFORMED", "request is not valid JSON")
        if not isinstance(req, dict):
            return _err("MALFORMED", "request must be a JSON object")
        op = req.get("op")
        if op == "register_tk":
            return self._register(req)
        if op == "transform":
            return self._transform(req)
        return _err("MALFORMED", f"unknown op {op!r}")

    @staticmethod
    def _field(req: dict, name: str) -> str:
        val = req.get(name)
        if not isinstance(val, str):
            raise KeyError(name)
        return val

    def _register(self, req: dict) -> dict:
        try:
            key_id = bytes.fromhex(self._field(req, "key_id"))
            tk_bytes = base64.b64decode(self._field(req, "tk_bytes"), validate=True)
        except (KeyError, ValueError, binascii.Error):
            return _err("MALFORMED", "bad register_tk fields")
        try:
            tk = decode_transform_key(tk_bytes)
        except MalformedEncoding as exc:
            return _err("MALFORMED", f"bad transform key: {exc}")
        if tk.key_id != key_id:
            return _err("MALFORMED", "key_id does not match the transform key")
        with self._lock:
            self._keys[key_id] = tk  # last registration wins
        return {"ok": True}

    def _transform(self, req: dict) -> dict:
        try:
            key_id = bytes.fromhex(self._field(req, "key_id"))
            ct_bytes = base64.b64decode(self._field(req, "ct_bytes"), validate=True)
        except (KeyError, ValueError, binascii.Error):
            return _err("MALFORMED", "bad transform fields")
        with self._lock:
            tk = self._keys.get(key_id)
        if tk is None:
            return _err("UNKNOWN_KEY", f"no transform key registered for {key_id.hex()}")
        try:
            ct = decode_ciphertext(ct_bytes)
        except MalformedEncoding as exc:
            return _err("MALFORMED", f"bad ciphertext: {exc}")

        if self.mode == "replay":
            with self._lock:
                if self._replay_response is not None:
                    return self._replay_response
        if self.mode == "stale":
            with self._lock:
                if self._stale_ct is None:
                    self._stale_ct = ct
                ct = self._stale_ct

        try:
            ctp = transform(self.pp, ct, tk)
        except NotSatisfied as exc:
            return _err("NOT_SATISFIED", str(exc))

        if self.mode == "garble":
            ctp = TransformedCiphertext(ctp.t_hat, ctp.t1, ctp.t2,
                                        random_gt(), ctp.t2_prime, ctp.key_id)
        elif self.mode == "swap":
            ctp = TransformedCiphertext(ctp.t_hat, ctp.t1, ctp.t2,
                                        ctp.t2_prime, ctp.t1_prime, ctp.key_id)

        resp = {"ok": True,
                "ct_prime_bytes": base64.b64encode(encode_transformed(ctp)).decode("ascii")}
        if self.mode == "replay":
            with self._lock:
                if self._replay_response is None:
                    self._replay_response = resp
        return resp


def start_proxy(pp, mode: str = "honest", listen_addr=("127.0.0.1", 0)) -> ProxyServer:
    """Start a proxy in a background thread; caller owns server.shutdown()."""
    server = ProxyServer(listen_addr, pp, mode)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server


def proxy_serve(listen_addr, mode: str, pp) -> None:
    """Run a proxy in the foreground until interrupted."""
    with ProxyServer(listen_addr, pp, mode) as server:
        host, port = server.server_address[:2]
        print(f"proxy listening on {host}:{port} mode={mode}")
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            pass


class ProxyClient:
    """Line-oriented client for the proxy protocol."""

    def __init__(self, addr, timeout: float = 30.0):
        if isinstance(addr, str):
            host, _, port = addr.rpartition(":")
            addr = (host or "127.0.0.1", int(port))
        self._sock = socket.create_connection(tuple(addr), timeout=timeout)
        self._rfile = self._sock.makefile("rb")

    def close(self):
        try:
            self._rfile.close()
        finally:
            self._sock.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _round_trip(self, req: dict) -> dict:
        self._sock.sendall(json.dumps(req).encode("utf-8") + b"\n")
        line = self._rfile.readline(_MAX_LINE + 1)
        if not line:
            raise ProxyError("CONNECTION_CLOSED", "proxy closed the connection")
        try:
            resp = json.loads(line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            raise ProxyError("BAD_RESPONSE", "proxy sent an unparseable response") from None
        if not isinstance(resp, dict):
            raise ProxyError("BAD_RESPONSE", "proxy response is not an object")
        if not resp.get("ok"):
            raise ProxyError(resp.get("error_code", "BAD_RESPONSE"),
                             resp.get("message", "proxy refused the request"))
        return resp

    def register_tk(self, tk) -> None:
        tk_bytes = tk if isinstance(tk, bytes) else encode_transform_key(tk)
        key_id = decode_transform_key(tk_bytes).key_id
        self._round_trip({
            "op": "register_tk",
            "key_id": key_id.hex(),
            "tk_bytes": base64.b64encode(tk_bytes).decode("ascii"),
        })

    def transform(self, ct, key_id: bytes) -> TransformedCiphertext:
        ct_bytes = ct if isinstance(ct, bytes) else encode_ciphertext(ct)
        resp = self._round_trip({
            "op": "transform",
            "key_id": key_id.hex(),
            "ct_bytes": base64.b64encode(ct_bytes).decode("ascii"),
        })
        try:
            blob = base64.b64decode(resp["ct_prime_bytes"], validate=True)
            return decode_transformed(blob)
        except (KeyError, ValueError, binascii.Error, MalformedEncoding) as exc:
            raise ProxyError("BAD_RESPONSE", f"undecodable transformed ciphertext: {exc}") from None
