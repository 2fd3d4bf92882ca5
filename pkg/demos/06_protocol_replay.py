#!/usr/bin/env python3
"""The wire protocol, the session log, and deterministic replay.

Every event crosses one JSON-per-frame protocol, and the session log is just
those frames in processing order. Feeding the logged inputs back through a
fresh engine regenerates the recorded outputs bit for bit, which is the
property that makes simulated studies auditable.
"""

import tempfile
from pathlib import Path

from farpoint import StudyDesign, protocol, verify_replay
from farpoint.config import default_config
from farpoint.simulator import HumanModel, SimScenario, simulate_run

design = StudyDesign(techniques=("hybrid",), widths=(50.0,),
                     amplitudes=(1000.0,), sets_per_condition=1)
scenario = SimScenario(design=design, human=HumanModel(rng_seed=12))
session = simulate_run(scenario).sessions["hybrid"]

print("first frames on the wire:")
for msg in session.messages[:6]:
    text = protocol.encode(msg).decode()
    print(f"  {text[:100]}{'...' if len(text) > 100 else ''}")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "session.ndjson"
    protocol.write_session_log(path, session.messages)
    print(f"\nlogged {len(session.messages)} frames "
          f"({path.stat().st_size / 1024:.0f} KiB)")

    loaded = protocol.load_session_log(path)
    outputs = verify_replay(loaded, default_config())
    print(f"replay regenerated {len(outputs)} output frames, all equal "
          f"to the recorded ones")

again = simulate_run(scenario).sessions["hybrid"]
identical = all(protocol.encode(a) == protocol.encode(b)
                for a, b in zip(session.messages, again.messages))
print(f"re-running the same seed is byte-identical: {identical}")

rec = session.records[0]
print(f"\nthe set that session ran: W={rec.spec.width_px:.0f} "
      f"A={rec.spec.amplitude_px:.0f}, accuracy {rec.accuracy:.2f}, "
      f"median RT {rec.median_rt_s:.2f} s")
