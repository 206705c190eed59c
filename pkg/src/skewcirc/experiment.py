"""Batch loss-curve experiments over random antisymmetric matrices."""

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import fileio
from .matgen import MatrixFamily, random_antisym
from .optimize import OptConfig, antisym_objective, minimize, seeded_start

CSV_NAME = "experiment.csv"


@dataclass
class ExperimentSpec:
    n_qubits_list: list
    family: MatrixFamily = field(default_factory=MatrixFamily)
    instances: int = 30
    base_seed: int = 0
    opt: OptConfig = field(default_factory=OptConfig)
    out_dir: Path = Path(".")

    def __post_init__(self):
        if self.instances < 1:
            raise ValueError("instances must be >= 1")
        if not self.n_qubits_list or any(not 2 <= n <= 7 for n in self.n_qubits_list):
            raise ValueError("every n_q must lie in [2, 7]")
        self.out_dir = Path(self.out_dir)


def run_id_for(n_q, family, index):
    return f"nq{n_q}-{family.tag.value}-{index:04d}"


def run_instance(n_q, family, index, base_seed, opt):
    """Optimize one random instance; matrix and start both use seed base_seed + index."""
    seed = base_seed + index
    a = random_antisym(n_q, family, seed)
    cfg = OptConfig(
        max_iters=opt.max_iters,
        grad_step=opt.grad_step,
        loss_tol=opt.loss_tol,
        max_restarts=opt.max_restarts,
        success_threshold=opt.success_threshold,
        seed=seed,
    )
    return minimize(antisym_objective(a), seeded_start(n_q, seed), cfg, run_id=run_id_for(n_q, family, index))


def _job(args):
    return args, run_instance(*args)


def run_experiment(spec, jobs=1):
    """Run every (n_q, instance) pair and write the CSV plus one SVG per n_q.

    Returns ``{run_id: OptTrace}``.
    """
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    if not os.access(spec.out_dir, os.W_OK):
        raise PermissionError(f"cannot write to {spec.out_dir}")
    tasks = [
        (n_q, spec.family, i, spec.base_seed, spec.opt)
        for n_q in spec.n_qubits_list
        for i in range(spec.instances)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_job, tasks))
    else:
        results = [_job(t) for t in tasks]

    traces = {}
    rows = []
    for (n_q, family, i, base_seed, _), trace in results:
        traces[trace.run_id] = trace
        rows.extend(fileio.trace_rows(trace, n_q, family.tag.value, base_seed + i))
    fileio.write_csv(spec.out_dir / CSV_NAME, rows)

    for n_q in spec.n_qubits_list:
        series = {
            rid: t.losses for rid, t in traces.items() if rid.startswith(f"nq{n_q}-")
        }
        svg = fileio.loss_svg(series, title=f"n_q = {n_q}, {spec.family.tag.value}: loss per iteration")
        (spec.out_dir / f"loss_nq{n_q}.svg").write_text(svg, encoding="utf-8")
    return traces
