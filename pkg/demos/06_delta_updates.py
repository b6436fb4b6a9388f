"""Incremental (delta) processing between two dump snapshots.

Processes a first dump fully, then runs a second dump through delta mode:
only the edited and added articles are reprocessed, everything else is
carried forward verbatim from the previous output.
"""
import tempfile
from pathlib import Path
from xml.sax.saxutils import escape

from wikicite.pipeline import RunConfig, run_delta, run_pipeline


def make_dump(path: Path, pages):
    body = "".join(
        f"<page><title>{escape(t)}</title><ns>0</ns><revision>"
        f"<timestamp>2024-05-01T00:00:00Z</timestamp><text>{escape(w)}</text>"
        f"</revision></page>" for t, w in pages)
    path.write_text(f'<mediawiki xmlns="http://www.mediawiki.org/xml/export-0.11/">'
                    f"{body}</mediawiki>", encoding="utf-8")


pages = [(f"Town {i}", f"Town {i} sits by the river. It holds a market.") for i in range(12)]

with tempfile.TemporaryDirectory() as workdir:
    workdir = Path(workdir)
    dump1 = workdir / "2024-05-01.xml"
    make_dump(dump1, pages)
    run_pipeline(RunConfig(language="en", out_dir=str(workdir / "run-may"),
                           dump=str(dump1), stages=("ingest", "parse"), chunk_size=5))
    print("first run complete (ingest + parse)")

    changed = list(pages)
    changed[4] = ("Town 4", "Town 4 sits by the river. The market moved uphill.")
    changed.append(("Town 12", "Town 12 was incorporated last spring."))
    dump2 = workdir / "2024-06-01.xml"
    make_dump(dump2, changed)

    _report, to_process, carried = run_delta(RunConfig(
        language="en", out_dir=str(workdir / "run-june"), dump=str(dump2),
        stages=("ingest", "parse"), chunk_size=5, prev_dir=str(workdir / "run-may")))
    print(f"delta: reprocessed {to_process}")
    print(f"carried forward {len(carried)} unchanged articles")

    may = (workdir / "run-may" / "en" / "parsed" / "chunk_00000.jsonl").read_text().splitlines()
    june = (workdir / "run-june" / "en" / "parsed" / "chunk_00000.jsonl").read_text().splitlines()
    identical = sum(1 for a, b in zip(may, june) if a == b)
    print(f"chunk_00000: {identical}/{len(may)} lines byte-identical across runs")
