from hypothesis import HealthCheck, settings

settings.register_profile("repo", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    merged: dict[int, list[tuple[bool, str]]] = {}
    for line in ACCEPTANCE_LINES:
        head, _, detail = line.partition(" - ")
        _, k, status = head.split()
        merged.setdefault(int(k.rstrip(":")), []).append((status == "PASS", detail))
    terminalreporter.section("acceptance criteria")
    for k in sorted(merged):
        ok = all(flag for flag, _ in merged[k])
        terminalreporter.write_line(f"CRITERION {k}: {'PASS' if ok else 'FAIL'} - "
                                    + " | ".join(d for _, d in merged[k]))
