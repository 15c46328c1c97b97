#!/usr/bin/env python3
"""Runs every gbulab verb on the fixture configs and validates the outputs.

Each JSON file written by the tool is validated against the schema named by its
"kind" field (files under compliance/ use compliance.schema.json).
"""
import argparse
import json
import os
import shutil
import struct
import subprocess
import sys
from pathlib import Path

import jsonschema

HERE = Path(__file__).resolve().parent
CONFIGS = HERE / "configs"
FIELD_HEADER = 32


class Checker:
    def __init__(self, exe, schemas, work):
        self.exe = exe
        self.work = work
        self.failures = []
        self.schemas = {}
        for p in sorted(schemas.glob("*.schema.json")):
            doc = json.loads(p.read_text())
            jsonschema.Draft202012Validator.check_schema(doc)
            self.schemas[p.name[: -len(".schema.json")]] = doc

    def expect(self, cond, what):
        print(("ok    " if cond else "FAIL  ") + what)
        if not cond:
            self.failures.append(what)

    def run(self, verb, config, out, *extra, env=None):
        cmd = [str(self.exe), verb, "--config", str(config)]
        if out is not None:
            cmd += ["--out", str(out)]
        cmd += list(extra)
        full_env = dict(os.environ)
        full_env.pop("GBULAB_OUT", None)
        full_env.update(env or {})
        r = subprocess.run(cmd, capture_output=True, text=True, env=full_env, cwd=self.work)
        return r.returncode, r.stderr

    def validate_tree(self, root):
        count = 0
        for p in sorted(root.rglob("*.json")):
            doc = json.loads(p.read_text())
            name = "compliance" if p.parent.name == "compliance" else doc.get("kind")
            schema = self.schemas.get(name)
            if schema is None:
                self.expect(False, f"{p.relative_to(self.work)}: no schema for kind {name!r}")
                continue
            try:
                jsonschema.validate(doc, schema, cls=jsonschema.Draft202012Validator)
                count += 1
            except jsonschema.ValidationError as e:
                self.expect(False, f"{p.relative_to(self.work)}: {e.message}")
        self.expect(count > 0, f"{root.name}: {count} JSON files validate")


def inject_fault(src, dst, nx, frame, node, value):
    data = bytearray(src.read_bytes())
    offset = frame * (FIELD_HEADER + 8 * nx) + FIELD_HEADER + 8 * node
    data[offset : offset + 8] = struct.pack("<d", value)
    dst.write_bytes(bytes(data))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--gbulab", required=True, type=Path)
    ap.add_argument("--schemas", required=True, type=Path)
    ap.add_argument("--work", required=True, type=Path)
    args = ap.parse_args()

    work = args.work.resolve()
    shutil.rmtree(work, ignore_errors=True)
    work.mkdir(parents=True)
    c = Checker(args.gbulab.resolve(), args.schemas.resolve(), work)

    # simulate: exit 0, artifacts present, canonical config round-trips, deterministic bytes.
    rc, err = c.run("simulate", CONFIGS / "simulate.ini", work / "sim")
    c.expect(rc == 0, f"simulate exits 0 (got {rc}) {err.strip()}")
    for f in ["config.ini", "run_report.json", "monitors.csv", "trajectory.bin", "snapshot.bin", "verdict.json"]:
        c.expect((work / "sim" / f).exists(), f"simulate writes {f}")
    rc, _ = c.run("simulate", work / "sim" / "config.ini", work / "sim_again")
    c.expect(rc == 0, "simulate accepts its own canonical config")
    c.expect((work / "sim" / "config.ini").read_text() == (work / "sim_again" / "config.ini").read_text(),
             "canonical config round-trips")
    for f in ["trajectory.bin", "monitors.csv", "snapshot.bin"]:
        c.expect((work / "sim" / f).read_bytes() == (work / "sim_again" / f).read_bytes(), f"{f} is bit-identical")
    a = json.loads((work / "sim" / "run_report.json").read_text())
    b = json.loads((work / "sim_again" / "run_report.json").read_text())
    a.pop("wall_seconds")
    b.pop("wall_seconds")
    c.expect(a == b, "run reports agree except wall time")

    # Restart from the written snapshot.
    restart = work / "restart"
    restart.mkdir()
    shutil.copy(work / "sim" / "snapshot.bin", restart / "snapshot.bin")
    text = (CONFIGS / "simulate.ini").read_text().replace("kind = simulate", "kind = simulate\nrestart_from = snapshot.bin")
    text = text.replace("t_end = 0.05", "t_end = 0.1")
    (restart / "config.ini").write_text(text)
    rc, err = c.run("simulate", restart / "config.ini", restart / "out")
    c.expect(rc == 0, f"restart exits 0 (got {rc}) {err.strip()}")
    rr = json.loads((restart / "out" / "run_report.json").read_text())
    c.expect(rr["series"]["t"][0] == a["final_time"] and rr["final_time"] == 0.1, "restart resumes at the snapshot time")

    # Compliance suite on a stationary problem: exit 0 and every margin is 0.
    rc, err = c.run("check", CONFIGS / "stationary.ini", work / "stationary")
    c.expect(rc == 0, f"stationary compliance exits 0 (got {rc}) {err.strip()}")
    v = json.loads((work / "stationary" / "verdict.json").read_text())
    c.expect(all(ch["worst_margin"] == 0.0 for ch in v["checks"]), "stationary margins are all 0")

    # Trajectory file check, clean and fault-injected.
    traj = work / "traj"
    traj.mkdir()
    shutil.copy(CONFIGS / "trajectory_check.ini", traj / "config.ini")
    shutil.copy(work / "sim" / "trajectory.bin", traj / "trajectory.bin")
    rc, err = c.run("check", traj / "config.ini", traj / "clean")
    c.expect(rc == 0, f"clean trajectory check exits 0 (got {rc}) {err.strip()}")
    inject_fault(work / "sim" / "trajectory.bin", traj / "trajectory.bin", nx=51, frame=1, node=25, value=5.0)
    rc, _ = c.run("check", traj / "config.ini", traj / "fault")
    c.expect(rc == 1, f"fault-injected trajectory exits 1 (got {rc})")
    v = json.loads((traj / "fault" / "verdict.json").read_text())
    mp = [ch for ch in v["checks"] if ch["name"] == "max_principle"]
    c.expect(bool(mp) and not mp[0]["pass"], "fault recorded as a max_principle failure")

    # detect-gbu: one RunReport per (threshold, resolution) plus a verdict file.
    rc, err = c.run("detect-gbu", CONFIGS / "detect_gbu.ini", work / "gbu", "--jobs", "4")
    c.expect(rc == 0, f"detect-gbu exits 0 (got {rc}) {err.strip()}")
    reports = sorted((work / "gbu" / "runs").glob("*/run_report.json"))
    c.expect(len(reports) == 3 * 2, f"detect-gbu writes 6 run reports (got {len(reports)})")
    c.expect((work / "gbu" / "gbu_verdict.json").exists(), "detect-gbu writes gbu_verdict.json")

    for verb, cfg, out in [
        ("continue-eps", "continue_eps.ini", "eps"),
        ("certify-barrier", "certify_barrier.ini", "barrier"),
        ("bisect-criterion", "bisect_criterion.ini", "criterion"),
        ("eig", "eig.ini", "eig"),
    ]:
        rc, err = c.run(verb, CONFIGS / cfg, work / out)
        c.expect(rc == 0, f"{verb} exits 0 (got {rc}) {err.strip()}")

    # Configuration errors: exit 2 with the violated hypothesis named in error.json.
    for cfg, needle in [("bad_exponents.ini", "requires q > p-1"), ("bad_criterion.ini", "q > p > 2")]:
        out = work / ("err_" + cfg[:-4])
        verb = "bisect-criterion" if "criterion" in cfg else "simulate"
        rc, _ = c.run(verb, CONFIGS / cfg, out)
        c.expect(rc == 2, f"{cfg} exits 2 (got {rc})")
        e = json.loads((out / "error.json").read_text())
        c.expect(needle in e["message"], f"{cfg} error names '{needle}'")
    rc, _ = c.run("eig", CONFIGS / "simulate.ini", work / "err_verb")
    c.expect(rc == 2, f"verb/kind mismatch exits 2 (got {rc})")

    # Output root from the environment when neither --out nor [experiment] output is set.
    rc, _ = c.run("eig", CONFIGS / "eig.ini", None, env={"GBULAB_OUT": str(work / "env_out")})
    c.expect(rc == 0 and (work / "env_out" / "eigen.json").exists(), "GBULAB_OUT sets the default output root")

    for d in sorted(p for p in work.iterdir() if p.is_dir()):
        c.validate_tree(d)

    print(f"{len(c.failures)} failure(s)")
    return 1 if c.failures else 0


if __name__ == "__main__":
    sys.exit(main())
