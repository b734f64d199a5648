"""Solve the exported LP files with HiGHS and compare against lsp's own MIP."""
import json
import os
import subprocess
import sys

try:
    import highspy
except ImportError:
    print("highspy not installed, skipping")
    sys.exit(77)

lsp, work = sys.argv[1], sys.argv[2]
os.makedirs(work, exist_ok=True)
failures = 0
for c in ["inf", "1.5"]:
    inst = os.path.join(work, f"inst_C{c}.json")
    subprocess.run([lsp, "generate", "--retailers", "4", "--warehouses", "2", "--horizon", "4",
                    "--plant-capacity-factor", c, "--seed", "5", "-o", inst], check=True)
    for method in ["mip-es", "mip-std"]:
        lp = os.path.join(work, f"C{c}_{method}.lp")
        out = subprocess.run([lsp, "solve", inst, "--method", method, "--budget", "600",
                              "--export-lp", lp], check=True, capture_output=True, text=True)
        ours = json.loads(out.stdout)
        h = highspy.Highs()
        h.setOptionValue("output_flag", False)
        h.readModel(lp)
        h.run()
        theirs = h.getInfo().objective_function_value
        ok = ours["status"] == "optimal" and abs(ours["objective"] - theirs) <= 1e-6 * max(1.0, abs(theirs))
        print(f"C={c} {method}: lsp={ours['objective']} highs={theirs} {'ok' if ok else 'MISMATCH'}")
        failures += not ok
sys.exit(1 if failures else 0)
