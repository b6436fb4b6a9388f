"""Local mock HTTP servers for scraper and enrichment tests (no network)."""
from __future__ import annotations

import http.server
import json
import threading
import time
from urllib.parse import parse_qs, urlsplit

WORDS_150 = " ".join(f"word{i}" for i in range(150))

ARTICLE_HTML = f"""<html><head><title>Mock Article</title>
<script>var x = 1;</script><style>p {{color: red}}</style></head>
<body><nav>Home | About</nav>
<h1>A Fine Article</h1>
<p>{WORDS_150}</p>
<p>See <a href="https://example.org/more">the details</a> for more.</p>
<table><tr><td>Cell A</td><td>Cell B</td></tr></table>
<!-- hidden comment -->
<footer>(c) nobody</footer></body></html>"""


class MockHandler(http.server.BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    def log_message(self, *args):
        pass

    def _send(self, status: int, body: bytes, content_type: str = "text/html; charset=utf-8"):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        self.server.request_log.append((self.path, time.monotonic()))
        split = urlsplit(self.path)
        query = {k: v[0] for k, v in parse_qs(split.query).items()}
        route = split.path
        if route == "/ok":
            self._send(200, ARTICLE_HTML.encode())
        elif route == "/slow":
            time.sleep(float(query.get("s", "1.0")))
            self._send(200, ARTICLE_HTML.encode())
        elif route == "/huge":
            n = int(query.get("chars", "1000001"))
            body = ("w " * (n // 2) + "w" * (n % 2)).encode()
            assert len(body) == n
            self._send(200, body, "text/plain; charset=utf-8")
        elif route == "/words":
            n = int(query.get("n", "100"))
            body = " ".join(f"tok{i}" for i in range(n))
            self._send(200, f"<html><body><p>{body}</p></body></html>".encode())
        elif route == "/skeleton":
            self._send(200, b"<html><head/><body/></html>")
        elif route == "/e403":
            self._send(403, b"<html><body>Forbidden area</body></html>")
        elif route == "/e404":
            self._send(404, b"<html><body>Nothing here</body></html>")
        elif route == "/plain":
            self._send(200, WORDS_150.encode(), "text/plain; charset=utf-8")
        elif route == "/pdf":
            self._send(200, b"%PDF-1.4 fake", "application/pdf")
        elif route == "/latin1":
            self._send(200, ("caf\xe9 " * 150).encode("latin-1"),
                       "text/plain; charset=ISO-8859-1")
        else:
            self._send(404, b"unknown route")


class MockServer:
    def __init__(self, handler=MockHandler):
        self.httpd = http.server.ThreadingHTTPServer(("127.0.0.1", 0), handler)
        self.httpd.request_log = []
        self._thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)

    @property
    def request_log(self):
        return self.httpd.request_log

    def url(self, path: str) -> str:
        return f"http://127.0.0.1:{self.httpd.server_port}{path}"

    def __enter__(self):
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self.httpd.shutdown()
        self.httpd.server_close()


class JsonApiHandler(http.server.BaseHTTPRequestHandler):
    """Scriptable JSON responder: server.responses maps path prefix to a
    list of (status, payload) consumed in order (last one sticks)."""

    protocol_version = "HTTP/1.1"

    def log_message(self, *args):
        pass

    def _respond(self):
        self.server.request_log.append((self.path, time.monotonic()))
        matches = [prefix for prefix in self.server.responses
                   if self.path.startswith(prefix) or prefix in self.path]
        if matches:
            # most specific route wins
            queue = self.server.responses[max(matches, key=len)]
            status, payload = queue[0] if len(queue) == 1 else queue.pop(0)
            body = json.dumps(payload).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)
            return
        self.send_response(404)
        self.send_header("Content-Length", "2")
        self.end_headers()
        self.wfile.write(b"{}")

    def do_GET(self):
        self._respond()

    def do_POST(self):
        length = int(self.headers.get("Content-Length", "0"))
        self.server.bodies.append(self.rfile.read(length).decode("utf-8"))
        self._respond()


class JsonApiServer(MockServer):
    def __init__(self):
        super().__init__(handler=JsonApiHandler)
        self.httpd.responses = {}
        self.httpd.bodies = []

    @property
    def responses(self):
        return self.httpd.responses

    @property
    def bodies(self):
        return self.httpd.bodies
