"""Line-oriented text rendering of execution traces, one event per line."""

from collections.abc import Iterable

from statefuzz.frontend.models import ContractPackage
from statefuzz.vm.models import ExecutionTrace


def _line_suffix(package: ContractPackage | None, pc: int) -> str:
    if package is None:
        return ""
    line = package.line_of(pc)
    return f" line={line}" if line is not None else ""


def dump_trace(trace: ExecutionTrace, package: ContractPackage | None = None) -> list[str]:
    """Render one transaction's events merged in step order."""
    header = (
        f"tx {trace.function} sender={trace.sender:#x} value={trace.value} "
        f"args={list(trace.args)} block={trace.env.number} ts={trace.env.timestamp}"
    )
    events: list[tuple[int, str]] = []
    for step in trace.steps:
        top = "-" if step.stack_top is None else hex(step.stack_top)
        events.append((-1, f"  step pc={step.pc} {step.opcode} top={top}"))
    for index, cmp in enumerate(trace.cmp_events):
        inner = f" inner={cmp.inner}" if cmp.inner is not None else ""
        events.append(
            (cmp.step, f"  cmp#{index} pc={cmp.pc} {cmp.op} a={cmp.a} b={cmp.b} -> {cmp.result}{inner}")
        )
    for branch in trace.branch_events:
        taint = ",".join(sorted(str(tag) for tag in branch.tags)) or "-"
        prov = "-" if branch.cond_provenance is None else f"cmp#{branch.cond_provenance}"
        events.append(
            (
                branch.step,
                f"  branch pc={branch.pc} {branch.branch_id[0]}->{branch.branch_id[1]} "
                f"taken={int(branch.taken)} depth={branch.depth} prov={prov} taint={taint}"
                f"{_line_suffix(package, branch.pc)}",
            )
        )
    for store in trace.storage_events:
        key = f"[{store.key:#x}]" if store.key is not None else ""
        events.append((store.step, f"  {store.kind} slot={store.slot}{key} value={store.value}"))
    for call in trace.call_events:
        events.append(
            (
                call.step,
                f"  {call.kind} pc={call.pc} to={call.target:#x} value={call.value} "
                f"depth={call.depth} gas>2300={int(call.gas_above_2300)} ok={int(call.succeeded)} "
                f"checked={int(call.result_checked)}{_line_suffix(package, call.pc)}",
            )
        )
    for wrap in trace.wrap_events:
        if wrap.wrapped:
            events.append((wrap.step, f"  wrap pc={wrap.pc} {wrap.op} {wrap.a},{wrap.b} -> {wrap.result}"))

    lines = [header]
    if trace.steps:
        lines.extend(text for step, text in events if step == -1)
    lines.extend(text for _, text in sorted((e for e in events if e[0] >= 0), key=lambda e: e[0]))
    status = "reverted" if trace.reverted else "ok"
    lines.append(f"end {status} reason={trace.halt_reason} steps={trace.step_count}")
    return lines


def dump_traces(traces: Iterable[ExecutionTrace], package: ContractPackage | None = None) -> str:
    return "\n".join(line for trace in traces for line in dump_trace(trace, package))
