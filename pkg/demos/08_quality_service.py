"""End-to-end with the trained quality model service (if installed).

Trains the companion quality-service package on a synthetic corpus, serves
it on a local port, and runs the toolkit's remote scoring client against
it — the same wire contract the pipeline's quality stage uses.  Requires
the quality-service package (see service/README.md).
"""
import tempfile
import threading
import time

try:
    import uvicorn
    from quality_service.data import make_synthetic_corpus
    from quality_service.serve import create_app
    from quality_service.train import TrainConfig, train
except ImportError:
    raise SystemExit("quality-service is not installed; see service/README.md")

from wikicite.quality import QualityThresholds, score_remote

with tempfile.TemporaryDirectory() as artifacts:
    print("training the quality model on a synthetic corpus (~15 s)…")
    corpus = make_synthetic_corpus(500, seed=7, languages=("en", "fr", "de", "ru"))
    result = train(corpus, TrainConfig(seed=0), out_dir=artifacts)
    print(f"fitted thresholds: {[round(c, 3) for c in result.thresholds.cuts]}")

    app = create_app(artifacts)
    server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=8417,
                                           log_level="warning"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    while not server.started:
        time.sleep(0.05)

    thresholds = QualityThresholds(cuts=result.thresholds.cuts)
    texts = [
        "404 not found. please enable javascript.",
        "about this archive: abstract only. a short preamble follows here.",
        "the committee met in 1987. its findings of 1992 shaped policy "
        "between 1994 and 2003. " + "steady prose follows. " * 30,
    ]
    for text, (raw, label) in zip(texts, score_remote(texts, "http://127.0.0.1:8417",
                                                      thresholds)):
        print(f"label {label} (raw {raw:0.3f})  <- {text[:60]!r}")

    server.should_exit = True
    thread.join(timeout=5)
