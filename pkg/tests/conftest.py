import os
import sys

sys.path.insert(0, os.path.dirname(__file__))


def pytest_terminal_summary(terminalreporter):
    lines = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            props = dict(getattr(rep, "user_properties", ()))
            if "criterion" not in props or rep.when != "call":
                continue
            runtime = props.get("runtime_s")
            took = f"{runtime:.2f} s" if runtime is not None else "n/a"
            verdict = "PASS" if outcome == "passed" else "FAIL"
            lines[props["criterion"]] = f"criterion {props['criterion']:2d}: {verdict}  ({took})  {props['title']}"
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
