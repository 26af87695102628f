"""JSON documents, task execution and machine-readable reports.

A document declares algebras, modules and Tor-pairs (on top of the always
available built-in corpus) and a list of tasks.  Loading validates the whole
object graph before any task runs and reports the first error with its JSON
path.  Reports are reproducible: identical (document, seed) pairs serialize
to identical JSON up to the wall-time field.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from .algebra import (
    Algebra,
    build_group_algebra_cyclic,
    build_truncated_poly,
    build_upper_triangular,
    validate_algebra,
)
from .approximation import (
    ApproxCertificate,
    FiltrationLayer,
    FiltrationWitness,
    deconstructible_precover,
    filtered_battery,
    filtration_verify,
    preenvelope_candidate,
    preenvelope_verify,
    trace,
    trace_cover,
)
from .corpus import corpus_algebras, corpus_modules, corpus_torpairs
from .homology import ext, tensor, tor
from .linalg import FpMatrix
from .modules import (
    LEFT,
    RIGHT,
    ModuleMap,
    ModuleRep,
    ShortExactSeq,
    cyclically_presented,
    direct_sum,
    dual,
    free_module,
    quotient,
    random_module,
    submodule,
    validate_module,
)
from .suites import SuiteResult, run_suite
from .torpairs import (
    TorPairGen,
    hereditary_probe,
    in_t,
    rel_pd,
    xpure_check,
)

FORMAT_VERSION = "1"

COMMANDS = (
    "validate",
    "tor",
    "ext",
    "tensor",
    "relpd",
    "in-t",
    "xpure",
    "hereditary-probe",
    "trace",
    "precover",
    "preenvelope",
    "filtration-verify",
    "suite",
)


class WorkbenchError(ValueError):
    """A document problem, carrying the JSON path of the first offender."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass
class WorkbenchDocument:
    version: str
    algebras: dict[str, Algebra]
    modules: dict[str, ModuleRep]
    torpairs: dict[str, TorPairGen]
    tasks: list[dict] = field(default_factory=list)


@dataclass
class Report:
    task: dict
    status: str  # pass | fail | inconclusive | capped
    payload: dict
    witnesses: dict
    seed: int
    bound: int
    wall_time_ms: float

    def to_dict(self, include_wall_time: bool = True) -> dict:
        d = {
            "task": self.task,
            "status": self.status,
            "payload": self.payload,
            "witnesses": self.witnesses,
            "seed": self.seed,
            "bound": self.bound,
        }
        if include_wall_time:
            d["wall_time_ms"] = self.wall_time_ms
        return d

    def to_json(self, include_wall_time: bool = True) -> str:
        return json.dumps(
            self.to_dict(include_wall_time), sort_keys=True, separators=(",", ":")
        )


# -- serialization helpers ------------------------------------------------------


def matrix_to_lists(m: FpMatrix) -> list[list[int]]:
    return m.to_rows()


def module_to_doc(m: ModuleRep) -> dict:
    return {
        "algebra": m.algebra.name,
        "p": m.p,
        "side": m.side,
        "dim": m.dim,
        "action": [matrix_to_lists(a) for a in m.action],
    }


def witness_to_doc(w: FiltrationWitness) -> dict:
    return {
        "module": module_to_doc(w.module),
        "levels": [matrix_to_lists(lv) for lv in w.levels],
        "layers": [
            {"tag": layer.tag, "surjection": matrix_to_lists(layer.surjection)}
            for layer in w.layers
        ],
    }


def certificate_to_doc(c: ApproxCertificate) -> dict:
    return {
        "kind": c.kind,
        "passed": c.passed,
        "source_dim": c.map.source.dim,
        "target_dim": c.map.target.dim,
        "map": matrix_to_lists(c.map.matrix),
        "test_records": list(c.test_records),
        "kernel_orthogonality": (
            list(c.kernel_orthogonality) if c.kernel_orthogonality is not None else None
        ),
    }


# -- document loading -------------------------------------------------------------


def _expect(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise WorkbenchError(path, message)


def _build_algebra(name: str, spec, path: str) -> Algebra:
    _expect(isinstance(spec, dict), path, "algebra entry must be an object")
    if "builder" in spec:
        builder = spec["builder"]
        builders = {
            "truncated_poly": build_truncated_poly,
            "upper_triangular": build_upper_triangular,
            "group_algebra_cyclic": build_group_algebra_cyclic,
        }
        _expect(builder in builders, f"{path}.builder", f"unknown builder {builder!r}")
        for key in ("p", "n"):
            _expect(isinstance(spec.get(key), int), f"{path}.{key}", "expected an integer")
        try:
            return builders[builder](spec["p"], spec["n"])
        except ValueError as e:
            raise WorkbenchError(path, str(e)) from e
    for key in ("p", "dim", "mul", "unit"):
        _expect(key in spec, f"{path}.{key}", "missing field")
    try:
        mul = tuple(
            tuple(tuple(int(c) for c in v) for v in row) for row in spec["mul"]
        )
        unit = tuple(int(c) for c in spec["unit"])
        a = Algebra(name, int(spec["p"]), int(spec["dim"]), mul, unit)
    except (TypeError, ValueError) as e:
        raise WorkbenchError(path, f"malformed algebra: {e}") from e
    v = validate_algebra(a)
    _expect(v.ok, path, f"algebra axioms fail: {v.first_failure()}")
    return a


def _build_module(
    spec, algebras: dict[str, Algebra], modules: dict[str, ModuleRep], path: str
) -> ModuleRep:
    _expect(isinstance(spec, dict), path, "module entry must be an object")
    if "builder" in spec:
        builder = spec["builder"]
        if builder == "dual":
            ref = spec.get("of")
            _expect(ref in modules, f"{path}.of", f"unresolved module reference {ref!r}")
            return dual(modules[ref])
        alg_name = spec.get("algebra")
        _expect(
            alg_name in algebras, f"{path}.algebra", f"unresolved algebra reference {alg_name!r}"
        )
        a = algebras[alg_name]
        side = spec.get("side", RIGHT)
        _expect(side in (LEFT, RIGHT), f"{path}.side", "side must be 'left' or 'right'")
        if builder == "free":
            _expect(isinstance(spec.get("rank"), int), f"{path}.rank", "expected an integer")
            return free_module(a, side, spec["rank"])
        if builder == "cyclic":
            x = spec.get("x")
            _expect(isinstance(x, list) and len(x) == a.dim, f"{path}.x", "element coordinates of wrong length")
            return cyclically_presented(a, x, side)
        if builder == "random":
            _expect(isinstance(spec.get("seed"), int), f"{path}.seed", "expected an integer")
            return random_module(
                a,
                spec["seed"],
                max_gens=spec.get("max_gens", 3),
                max_rank=spec.get("max_rank", 3),
                side=side,
            )
        if builder == "quotient_by":
            gens = spec.get("gens")
            _expect(isinstance(gens, list), f"{path}.gens", "expected a list of rows")
            reg = free_module(a, side, spec.get("rank", 1))
            _, incl = submodule(reg, gens)
            return quotient(reg, incl)[0]
        raise WorkbenchError(f"{path}.builder", f"unknown builder {builder!r}")
    for key in ("algebra", "side", "dim", "action"):
        _expect(key in spec, f"{path}.{key}", "missing field")
    alg_name = spec["algebra"]
    _expect(alg_name in algebras, f"{path}.algebra", f"unresolved algebra reference {alg_name!r}")
    a = algebras[alg_name]
    try:
        action = tuple(FpMatrix(a.p, rows) for rows in spec["action"])
        m = ModuleRep(a, spec["side"], int(spec["dim"]), action)
    except (TypeError, ValueError) as e:
        raise WorkbenchError(path, f"malformed module: {e}") from e
    v = validate_module(m)
    _expect(v.ok, path, f"module axioms fail: {v.failures[0]}")
    return m


def module_from_doc(spec: dict, algebras: dict[str, Algebra], path: str = "$") -> ModuleRep:
    """An inline module document (used by witness payloads)."""
    by_name = dict(algebras)
    if isinstance(spec.get("algebra"), str) and spec["algebra"] not in by_name:
        raise WorkbenchError(f"{path}.algebra", f"unresolved algebra {spec['algebra']!r}")
    return _build_module(spec, by_name, {}, path)


def witness_from_doc(
    spec: dict, algebras: dict[str, Algebra], modules: dict[str, ModuleRep], path: str = "$"
) -> FiltrationWitness:
    _expect(isinstance(spec, dict), path, "witness must be an object")
    mod_spec = spec.get("module")
    if isinstance(mod_spec, str):
        _expect(mod_spec in modules, f"{path}.module", f"unresolved module {mod_spec!r}")
        module = modules[mod_spec]
    else:
        module = module_from_doc(mod_spec, algebras, f"{path}.module")
    try:
        levels = tuple(
            FpMatrix(module.p, rows)
            if rows
            else FpMatrix.zeros(module.p, 0, module.dim)
            for rows in spec["levels"]
        )
        layers = tuple(
            FiltrationLayer(
                int(layer["tag"]),
                FpMatrix(module.p, layer["surjection"])
                if layer["surjection"]
                else FpMatrix.zeros(module.p, 0, 0),
            )
            for layer in spec["layers"]
        )
    except (KeyError, TypeError, ValueError) as e:
        raise WorkbenchError(path, f"malformed witness: {e}") from e
    return FiltrationWitness(module, levels, layers)


def builtin_document() -> WorkbenchDocument:
    return WorkbenchDocument(
        FORMAT_VERSION,
        dict(corpus_algebras()),
        dict(corpus_modules()),
        dict(corpus_torpairs()),
        [],
    )


def load(text: str) -> WorkbenchDocument:
    """Parse and fully validate a document; built-ins are always in scope."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise WorkbenchError("$", f"not valid JSON: {e}") from e
    _expect(isinstance(raw, dict), "$", "document must be a JSON object")
    version = raw.get("version")
    _expect(isinstance(version, str), "$.version", "missing or non-string version")
    _expect(version == FORMAT_VERSION, "$.version", f"unsupported version {version!r}")
    doc = builtin_document()
    for section in raw:
        _expect(
            section in ("version", "algebras", "modules", "torpairs", "tasks"),
            f"$.{section}",
            "unknown section",
        )

    algebras = raw.get("algebras", {})
    _expect(isinstance(algebras, dict), "$.algebras", "must be an object")
    for name, spec in algebras.items():
        path = f"$.algebras.{name}"
        _expect(name not in doc.algebras, path, "name shadows a built-in")
        doc.algebras[name] = _build_algebra(name, spec, path)

    modules = raw.get("modules", {})
    _expect(isinstance(modules, dict), "$.modules", "must be an object")
    for name, spec in modules.items():
        path = f"$.modules.{name}"
        _expect(name not in doc.modules, path, "name shadows a built-in")
        doc.modules[name] = _build_module(spec, doc.algebras, doc.modules, path)

    torpairs = raw.get("torpairs", {})
    _expect(isinstance(torpairs, dict), "$.torpairs", "must be an object")
    for name, spec in torpairs.items():
        path = f"$.torpairs.{name}"
        _expect(name not in doc.torpairs, path, "name shadows a built-in")
        _expect(isinstance(spec, dict), path, "torpair entry must be an object")
        alg_name = spec.get("algebra")
        _expect(alg_name in doc.algebras, f"{path}.algebra", f"unresolved algebra {alg_name!r}")
        gens = spec.get("gens")
        _expect(isinstance(gens, list) and gens, f"{path}.gens", "need a nonempty list")
        resolved = []
        for i, g in enumerate(gens):
            _expect(g in doc.modules, f"{path}.gens[{i}]", f"unresolved module {g!r}")
            resolved.append(doc.modules[g])
        try:
            doc.torpairs[name] = TorPairGen(doc.algebras[alg_name], tuple(resolved), name)
        except ValueError as e:
            raise WorkbenchError(path, str(e)) from e

    tasks = raw.get("tasks", [])
    _expect(isinstance(tasks, list), "$.tasks", "must be a list")
    for i, task in enumerate(tasks):
        path = f"$.tasks[{i}]"
        _expect(isinstance(task, dict), path, "task must be an object")
        cmd = task.get("command")
        _expect(cmd in COMMANDS, f"{path}.command", f"unknown command {cmd!r}")
        for key in ("M", "N"):
            if key in task and isinstance(task[key], str):
                _expect(
                    task[key] in doc.modules, f"{path}.{key}", f"unresolved module {task[key]!r}"
                )
        if "torpair" in task:
            _expect(
                task["torpair"] in doc.torpairs,
                f"{path}.torpair",
                f"unresolved torpair {task['torpair']!r}",
            )
        for key in ("X", "G"):
            if key in task:
                _expect(isinstance(task[key], list), f"{path}.{key}", "must be a list")
                for j, g in enumerate(task[key]):
                    _expect(
                        g in doc.modules, f"{path}.{key}[{j}]", f"unresolved module {g!r}"
                    )
        doc.tasks.append(task)
    return doc


# -- task execution -----------------------------------------------------------------


def _ses_from_task(task: dict, doc: WorkbenchDocument, path: str) -> ShortExactSeq:
    spec = task.get("ses")
    _expect(isinstance(spec, dict), f"{path}.ses", "missing ses object")
    name = spec.get("module")
    _expect(name in doc.modules, f"{path}.ses.module", f"unresolved module {name!r}")
    B = doc.modules[name]
    gens = spec.get("sub_gens", [])
    _expect(isinstance(gens, list), f"{path}.ses.sub_gens", "must be a list of rows")
    _, incl = submodule(B, gens)
    _, proj = quotient(B, incl)
    return ShortExactSeq(incl, proj)


def execute_task(
    task: dict,
    doc: WorkbenchDocument,
    seed: int = 0,
    bound: int = 8,
    cap: int = 32,
    trials: int = 200,
) -> Report:
    """Run one task; failures inside the task become a failed report, not a crash."""
    start = time.perf_counter()
    seed = int(task.get("seed", seed))
    bound = int(task.get("bound", bound))
    cap = int(task.get("cap", cap))
    trials = int(task.get("trials", trials))
    status = "pass"
    payload: dict = {}
    witnesses: dict = {}
    try:
        cmd = task.get("command")
        if cmd == "validate":
            bad = []
            for name, a in doc.algebras.items():
                if not validate_algebra(a).ok:
                    bad.append(f"algebra {name}")
            for name, m in doc.modules.items():
                if not validate_module(m).ok:
                    bad.append(f"module {name}")
            payload = {
                "algebras": len(doc.algebras),
                "modules": len(doc.modules),
                "invalid": bad,
            }
            status = "pass" if not bad else "fail"
        elif cmd == "tor":
            r = tor(int(task["n"]), doc.modules[task["M"]], doc.modules[task["N"]])
            payload = {"degree": r.degree, "dimension": r.dimension}
        elif cmd == "ext":
            r = ext(int(task["n"]), doc.modules[task["M"]], doc.modules[task["N"]])
            payload = {"degree": r.degree, "dimension": r.dimension}
        elif cmd == "tensor":
            ts = tensor(doc.modules[task["M"]], doc.modules[task["N"]])
            payload = {"dimension": ts.dim}
        elif cmd == "relpd":
            value = rel_pd(doc.modules[task["M"]], doc.torpairs[task["torpair"]], bound)
            payload = {"value": value.to_json(), "bound": bound}
        elif cmd == "in-t":
            member = in_t(doc.modules[task["M"]], doc.torpairs[task["torpair"]])
            payload = {"member": member}
        elif cmd == "xpure":
            ses = _ses_from_task(task, doc, "$.task")
            X = [doc.modules[x] for x in task.get("X", [])]
            payload = {
                "xpure": xpure_check(ses, X),
                "dims": [ses.A.dim, ses.B.dim, ses.C.dim],
            }
        elif cmd == "hereditary-probe":
            rep = hereditary_probe(doc.torpairs[task["torpair"]], seed, trials, bound)
            payload = {
                "trials": rep.trials,
                "checked": rep.fired,
                "violations": list(rep.violations),
                "bound": bound,
            }
            status = "pass" if rep.ok else "fail"
        elif cmd == "trace":
            M = doc.modules[task["M"]]
            Xset = [doc.modules[x] for x in task.get("X", [])]
            t_rep, _ = trace(Xset, M)
            payload = {
                "trace_dim": t_rep.dim,
                "module_dim": M.dim,
                "generated": t_rep.dim == M.dim,
            }
        elif cmd == "precover":
            M = doc.modules[task["M"]]
            G = [doc.modules[g] for g in task.get("G", [])]
            battery = filtered_battery(G, cap=24)
            f, w = trace_cover(M, battery)
            result = deconstructible_precover(
                M, G, f, w, test_set=[fm.module for fm in battery], cap=cap
            )
            if result.status == "capped":
                status = "capped"
                payload = {"stages": result.completion.stages, "reason": result.completion.reason}
            else:
                status = "pass" if result.ok else "fail"
                payload = {
                    "stages": result.completion.stages,
                    "precover_dim": result.map.source.dim,
                    "kernel_orthogonality": list(
                        result.certificate.kernel_orthogonality or ()
                    ),
                    "battery_size": len(battery),
                }
                witnesses = {
                    "certificate": certificate_to_doc(result.certificate),
                    "filtration": witness_to_doc(result.witness),
                }
        elif cmd == "preenvelope":
            M = doc.modules[task["M"]]
            G = [doc.modules[g] for g in task.get("G", [])]
            h = preenvelope_candidate(M, G)
            test_set = list(G) + [direct_sum([a, b]).module for a in G for b in G]
            cert = preenvelope_verify(h, test_set)
            status = "pass" if cert.passed else "fail"
            payload = {"envelope_dim": h.target.dim, "tests": len(test_set)}
            witnesses = {"certificate": certificate_to_doc(cert)}
        elif cmd == "filtration-verify":
            w = witness_from_doc(task.get("witness"), doc.algebras, doc.modules)
            G = [doc.modules[g] for g in task.get("G", [])]
            rep = filtration_verify(w, G)
            status = "pass" if rep.ok else "fail"
            payload = {"layers": rep.layer_count, "failures": list(rep.failures)}
        elif cmd == "suite":
            result = run_suite(
                task.get("name", "all"),
                seed=seed,
                trials=task.get("trials"),
                bound=task.get("bound"),
                cap=task.get("cap"),
            )
            results = result if isinstance(result, list) else [result]
            payload = {
                "suites": {
                    r.name: {"status": r.status, **r.payload} for r in results
                },
                "failures": [f for r in results for f in r.failures],
            }
            statuses = {r.status for r in results}
            if "fail" in statuses:
                status = "fail"
            elif "capped" in statuses:
                status = "capped"
            elif "inconclusive" in statuses:
                status = "inconclusive"
        else:
            status = "fail"
            payload = {"error": f"unknown command {cmd!r}"}
    except WorkbenchError as e:
        status = "fail"
        payload = {"error": str(e)}
    except (KeyError, TypeError, ValueError) as e:
        status = "fail"
        payload = {"error": f"{type(e).__name__}: {e}"}
    wall = (time.perf_counter() - start) * 1000.0
    return Report(dict(task), status, payload, witnesses, seed, bound, wall)


def run(
    doc: WorkbenchDocument,
    seed: int = 0,
    bound: int = 8,
    cap: int = 32,
    trials: int = 200,
) -> list[Report]:
    """Execute the document's tasks in order; one task's failure never aborts
    the stream."""
    return [execute_task(t, doc, seed, bound, cap, trials) for t in doc.tasks]


def exit_code(reports: list[Report]) -> int:
    statuses = {r.status for r in reports}
    if "fail" in statuses:
        return 1
    if "capped" in statuses:
        return 3
    return 0
