"""Line-oriented key=value reports and the figures rendered beside them.

Every CLI report path emits one record per line, `key=value` pairs
separated by single spaces; values containing spaces are double-quoted.
When a figures directory is given, the same data is also rendered to PNG
files there (figures are visualisation only; all arithmetic stays exact,
values are converted to floats just for plotting).
"""

import os


def record(**kv):
    parts = []
    for k, v in kv.items():
        s = str(v)
        if " " in s or "=" in s:
            s = '"' + s.replace('"', "'") + '"'
        parts.append(f"{k}={s}")
    return " ".join(parts)


class ReportWriter:
    """Writes records to stdout and optionally tees them into a file."""

    def __init__(self, path=None, quiet=False):
        self.path = path
        self.quiet = quiet
        self._fh = open(path, "w", encoding="utf-8") if path else None

    def emit(self, **kv):
        line = record(**kv)
        if not self.quiet:
            print(line)
        if self._fh:
            self._fh.write(line + "\n")

    def close(self):
        if self._fh:
            self._fh.close()
            self._fh = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def render_suite_figure(results, path):
    """Stacked pass/fail bar chart, one bar per verification suite."""
    plt = _pyplot()
    names = [r.name for r in results]
    passed = [sum(1 for _, ok, _ in r.checks if ok) for r in results]
    failed = [sum(1 for _, ok, _ in r.checks if not ok) for r in results]
    fig, ax = plt.subplots(figsize=(8, max(2.0, 0.5 * len(names) + 1)))
    ypos = range(len(names))
    ax.barh(ypos, passed, color="#2a9d2a", label="pass")
    ax.barh(ypos, failed, left=passed, color="#c03030", label="fail")
    ax.set_yticks(list(ypos))
    ax.set_yticklabels(names)
    ax.set_xlabel("checks")
    ax.set_title("verification suites")
    ax.legend(loc="lower right")
    fig.tight_layout()
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_norm_profile(terms, u, total, path, title=None):
    """Per-exponent term norms |a_i| u^i with the attained sup marked."""
    plt = _pyplot()
    exps = sorted(terms)
    vals = [float(terms[e]) for e in exps]
    fig, ax = plt.subplots(figsize=(7, 4))
    markerline, stemlines, _ = ax.stem(exps, vals)
    plt.setp(markerline, color="#30507d")
    plt.setp(stemlines, color="#30507d", alpha=0.6)
    ax.axhline(float(total), color="#c08030", linestyle="--",
               label=f"|x|_u = {total}")
    ax.set_xlabel("exponent of t")
    ax.set_ylabel("term norm |a_i| u^i")
    ax.set_title(title or f"norm profile at u = {u}")
    ax.legend()
    fig.tight_layout()
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
