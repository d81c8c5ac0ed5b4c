import json
import sys
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

sys.path.insert(0, str(Path(__file__).parent))


def write_frames(directory: Path, rasters, times=None, suffix=".ppm"):
    directory.mkdir(parents=True, exist_ok=True)
    times = range(0, 10 * len(rasters), 10) if times is None else times
    for t, raster in zip(times, rasters):
        Image.fromarray(np.asarray(raster, dtype=np.uint8), "RGB").save(directory / f"{t}{suffix}")
    return directory


def static_video(rng, n_frames=6, size=16, perturb=0.02):
    """A base frame with at most ``perturb`` of its pixels recoloured per frame."""
    base = rng.integers(0, 256, size=(size, size, 3), dtype=np.uint8)
    frames = []
    n_pix = size * size
    for _ in range(n_frames):
        f = base.copy()
        flat = f.reshape(-1, 3)
        idx = rng.choice(n_pix, size=int(perturb * n_pix), replace=False)
        flat[idx] = rng.integers(0, 256, size=(idx.size, 3), dtype=np.uint8)
        frames.append(f)
    return frames


def random_video(rng, n_frames=6, size=16):
    return [rng.integers(0, 256, size=(size, size, 3), dtype=np.uint8) for _ in range(n_frames)]


def write_jsonl(path: Path, rows):
    path.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


API_PAGES = {
    "java/util/ArrayList": """<html><head><title>ArrayList</title><script>var x = 1;</script></head>
<body><h1>Class <code>ArrayList</code></h1>
<p>Resizable-array implementation of the <code>List</code> interface.</p>
<pre><code>boolean <a href="#contains">contains</a>(<a href="Object.html">Object</a> o)</code></pre>
<p>Returns true if this list contains the specified element.</p></body></html>""",
    "java/util/HashMap": """<html><body><h1>Class HashMap</h1>
<p>Hash table based implementation of the <code>Map</code> interface. Keys and values.</p>
<pre>V put(K key, V value)</pre></body></html>""",
    "java/util/LinkedList": """<html><body><h1>Class LinkedList</h1>
<p>Doubly-linked list implementation of the <code>List</code> and <code>Deque</code> interfaces.</p>
</body></html>""",
    "javax/swing/JOptionPane": """<html><body><h1>Class JOptionPane</h1>
<p>Makes it easy to pop up a standard dialog box that prompts users for a value.</p>
<pre>static void showMessageDialog(Component parent, Object message)</pre></body></html>""",
    "java/sql/Connection": """<html><body><h1>Interface Connection</h1>
<p>A connection with a specific database. SQL statements are executed and results returned.</p>
</body></html>""",
}


@pytest.fixture
def api_docs_dir(tmp_path):
    root = tmp_path / "docs"
    for doc_id, html in API_PAGES.items():
        p = root / f"{doc_id}.html"
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(html, encoding="utf-8")
    return root


_acceptance_lines = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if item.module.__name__.endswith("test_acceptance") and (
        report.when == "call" or (report.when == "setup" and report.outcome != "passed")
    ):
        label = (item.function.__doc__ or item.name).strip().splitlines()[0]
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        _acceptance_lines.append(f"[{status}] {label} ({report.duration:.2f}s)")


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
