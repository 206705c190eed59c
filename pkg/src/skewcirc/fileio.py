"""Matrix text files, loss-trace CSV and SVG loss plots.

Matrix files: the first non-comment line holds N, followed by N lines of N
whitespace-separated entries. Complex entries are written ``re,im``. Lines
starting with ``#`` are comments.
"""

import csv
import io as _io
from html import escape

import numpy as np

CSV_HEADER = ("run_id", "n_q", "family", "seed", "restart", "iteration", "loss")


class MatrixParseError(ValueError):
    def __init__(self, line, msg):
        self.line = line
        super().__init__(f"line {line}: {msg}")


def _parse_entry(tok, lineno, complex_):
    try:
        if complex_:
            if "," in tok:
                re_, im_ = tok.split(",")
                return complex(float(re_), float(im_))
            return complex(float(tok), 0.0)
        return float(tok)
    except ValueError:
        raise MatrixParseError(lineno, f"cannot parse entry {tok!r}") from None


def parse_matrix(text, complex_=False):
    rows = []
    n = None
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            try:
                n = int(line)
            except ValueError:
                raise MatrixParseError(lineno, f"expected the dimension N, got {line!r}") from None
            if n < 1:
                raise MatrixParseError(lineno, "dimension must be positive")
            continue
        if len(rows) == n:
            raise MatrixParseError(lineno, f"more than {n} rows")
        toks = line.split()
        if len(toks) != n:
            raise MatrixParseError(lineno, f"expected {n} entries, got {len(toks)}")
        rows.append([_parse_entry(t, lineno, complex_) for t in toks])
    if n is None:
        raise MatrixParseError(max(lineno, 1), "empty matrix file")
    if len(rows) != n:
        raise MatrixParseError(lineno + 1, f"expected {n} rows, got {len(rows)}")
    return np.array(rows, dtype=np.complex128 if complex_ else np.float64)


def read_matrix(path, complex_=False):
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read(), complex_)


def format_matrix(m, complex_=False, comment=None):
    m = np.asarray(m)
    out = []
    if comment:
        out.extend(f"# {c}" for c in comment.splitlines())
    out.append(str(m.shape[0]))
    for row in m:
        if complex_:
            out.append(" ".join(f"{z.real:.17g},{z.imag:.17g}" for z in row.astype(np.complex128)))
        else:
            out.append(" ".join(f"{float(x):.17g}" for x in row))
    return "\n".join(out) + "\n"


def write_matrix(path, m, complex_=False, comment=None):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_matrix(m, complex_, comment))


def trace_rows(trace, n_q, family, seed):
    """CSV rows for every restart of one OptTrace."""
    for restart, losses in enumerate(trace.history):
        for it, loss in enumerate(losses):
            yield (trace.run_id, n_q, family, seed, restart, it, repr(float(loss)))


def write_csv(path, rows):
    rows = sorted(rows, key=lambda r: (r[0], r[4], r[5]))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        w.writerows(rows)


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def loss_svg(series, title="", width=640, height=420):
    """Overlay one polyline per run: iteration on x, loss on a linear y axis."""
    left, right, top, bottom = 70, 20, 40, 50
    pw, ph = width - left - right, height - top - bottom
    xmax = max((len(v) - 1 for v in series.values()), default=1) or 1
    ymax = max((max(v) for v in series.values() if v), default=1.0) or 1.0

    def sx(i):
        return left + pw * i / xmax

    def sy(y):
        return top + ph * (1.0 - y / ymax)

    buf = _io.StringIO()
    buf.write(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
    )
    buf.write(f'<rect width="{width}" height="{height}" fill="white"/>\n')
    buf.write(f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>\n')
    buf.write(
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>\n'
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>\n'
    )
    for k in range(5):
        yv = ymax * k / 4
        xv = xmax * k / 4
        buf.write(f'<text x="{left - 6}" y="{sy(yv) + 4:.1f}" text-anchor="end" font-size="10">{yv:.3g}</text>\n')
        buf.write(
            f'<text x="{sx(xv):.1f}" y="{top + ph + 14}" text-anchor="middle" font-size="10">{xv:.0f}</text>\n'
        )
    buf.write(
        f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle" font-size="12">iteration</text>\n'
        f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {top + ph / 2:.1f})">loss</text>\n'
    )
    for idx, (run_id, losses) in enumerate(sorted(series.items())):
        pts = " ".join(f"{sx(i):.2f},{sy(v):.2f}" for i, v in enumerate(losses))
        buf.write(
            f'<polyline data-run="{escape(run_id)}" fill="none" stroke-width="1.2" '
            f'stroke="{_PALETTE[idx % len(_PALETTE)]}" points="{pts}"/>\n'
        )
    buf.write("</svg>\n")
    return buf.getvalue()
