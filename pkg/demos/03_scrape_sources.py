"""Scrape web citation sources and observe the failure taxonomy.

Runs a local mock web server with several page personalities — a healthy
article, a 404, a skeleton page, a paywall stub — and scrapes citations
pointing at each, printing the exclusive field pattern per outcome.
"""
import http.server
import threading

from wikicite.scrape import ScrapePolicy, scrape_url

GOOD = ("<html><body><h1>Field Notes</h1>"
        + "".join(f"<p>Observation {i} recorded in the valley meadow.</p>" for i in range(40))
        + '<p>See <a href="https://example.org/ref">the appendix</a>.</p></body></html>')


class Handler(http.server.BaseHTTPRequestHandler):
    def log_message(self, *a):
        pass

    def do_GET(self):
        routes = {
            "/article": (200, GOOD),
            "/gone": (404, "<html><body>Nothing here.</body></html>"),
            "/skeleton": (200, "<html><head/><body/></html>"),
            "/paywall": (200, "<html><body><p>Subscribe to read this story.</p></body></html>"),
        }
        status, body = routes.get(self.path, (404, "?"))
        data = body.encode()
        self.send_response(status)
        self.send_header("Content-Type", "text/html; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)


server = http.server.ThreadingHTTPServer(("127.0.0.1", 0), Handler)
threading.Thread(target=server.serve_forever, daemon=True).start()
base = f"http://127.0.0.1:{server.server_port}"

policy = ScrapePolicy(timeout_seconds=5.0, per_host_delay=0.01)
print(f"policy: timeout={policy.timeout_seconds}s cap={policy.max_chars} chars "
      f"min_tokens={policy.min_tokens}\n")

for path in ("/article", "/gone", "/skeleton", "/paywall"):
    outcome = scrape_url(base + path, policy)
    print(f"{path:10s} -> {outcome.status}")
    if outcome.text:
        print(f"{'':13s}extracted {len(outcome.text)} chars, "
              f"starts {outcome.text[:48]!r}")
    else:
        print(f"{'':13s}{outcome.error_message}")

server.shutdown()
