"""Plain-text and key=value renderings of an estimate."""
from __future__ import annotations

from .smc import Estimate

RECORD_KEYS = ("contract", "n", "successes", "p_hat", "relation", "threshold",
               "epsilon", "delta", "verdict", "seed", "seeds")


def percent(p: float) -> str:
    return f"{100 * p:.1f} %"


def format_text(est: Estimate, name: str | None = None) -> str:
    lines = []
    if name:
        lines.append(f"contract    {name}")
    lines.append(f"runs        {est.n}")
    lines.append(f"successes   {est.successes}")
    lines.append(f"estimate    {percent(est.p_hat)}")
    if est.epsilon is not None:
        lines.append(f"precision   +/- {est.epsilon} with confidence {1 - est.delta:g}")
    lines.append(f"requirement P {est.relation} {percent(est.threshold)}")
    lines.append(f"verdict     {est.verdict}")
    return "\n".join(lines) + "\n"


def format_records(est: Estimate, name: str | None = None) -> str:
    fields = {
        "contract": name or "",
        "n": est.n,
        "successes": est.successes,
        "p_hat": repr(est.p_hat),
        "relation": est.relation,
        "threshold": repr(est.threshold),
        "epsilon": "" if est.epsilon is None else repr(est.epsilon),
        "delta": "" if est.delta is None else repr(est.delta),
        "verdict": est.verdict,
        "seed": "" if est.seed is None else est.seed,
        "seeds": ",".join(str(s) for s in est.seeds),
    }
    return "".join(f"{k}={fields[k]}\n" for k in RECORD_KEYS)


def parse_records(text: str) -> list[dict]:
    """Read back one or more record blocks (each starts at a ``contract=`` line)."""
    blocks, current = [], None
    for line in text.splitlines():
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"not a record line: {line!r}")
        if key == "contract" or current is None:
            current = {}
            blocks.append(current)
        current[key] = value
    for b in blocks:
        for k in ("n", "successes"):
            if k in b:
                b[k] = int(b[k])
        for k in ("p_hat", "threshold", "epsilon", "delta"):
            if b.get(k):
                b[k] = float(b[k])
        b["seeds"] = [int(s) for s in b.get("seeds", "").split(",") if s]
    return blocks
