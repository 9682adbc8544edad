"""
Checking the analytic bounds against a simulated run
====================================================

The analyzer promises intervals for every delay component; the
simulator produces per-frame measurements. validate_against_analysis
lines the two up and counts violations. The second half of the script
shows the self-test knob: shrinking healthy bounds has to make the
check fail, otherwise the validation itself proves nothing.
"""

from pipedelay import Vanilla, analyze, load_scenario, run, validate_against_analysis

scenario = load_scenario("case2")
variant = Vanilla(scenario.queue_size)
bounds = analyze(scenario.camera, scenario.usb, scenario.profile, variant)
result = run(scenario.sim_config(variant))


def show(report):
    print(f"{'check':<14}{'n':>7}{'violations':>12}"
          f"{'bound':>21}{'observed':>23}")
    for c in report.checks:
        print(f"{c.name:<14}{c.n_checked:>7}{c.n_violations:>12}"
              f"{c.lo:>10.2f} {c.hi:>10.2f}"
              f"{c.observed_min:>11.2f} {c.observed_max:>11.2f}")
    print("result:", "PASS" if report.ok else "FAIL")
    for note in report.notes:
        print("note:", note)


print(f"regime {bounds.regime.name}, "
      f"saturation certified: {bounds.saturation_certified}\n")
show(validate_against_analysis(result, bounds))

# Tighten every interval by 10 ms from both sides. A sound model with
# near-tight bounds must now report violations; silence here would mean
# the checks are too loose to be trusted.
print("\nwith bounds shrunk by 10 ms:")
show(validate_against_analysis(result, bounds, shrink_ms=10.0))
