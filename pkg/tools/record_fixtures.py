"""Record service payload fixtures for the frontend contract tests.

Runs the two sessions the UI acceptance check needs (the four-transition
example and the mixed forward/backward state) against the in-process app
and freezes every payload the client sees.  Regenerate with:

    python3 tools/record_fixtures.py
"""
import json
from pathlib import Path

from fastapi.testclient import TestClient

from revccs.service import create_app

OUT = Path(__file__).resolve().parent.parent / "frontend" / "test" / "fixtures"


def record_flow(client: TestClient, name: str, source: str, inverse_of=0):
    flow = {}
    created = client.post("/sessions", json={"source": source}).json()
    sid = created["id"]
    created["id"] = "fixture"  # stable across recordings
    flow["create"] = created
    moves0 = client.get(f"/sessions/{sid}/moves").json()
    flow["moves_initial"] = moves0
    applied = client.post(f"/sessions/{sid}/moves/{inverse_of}").json()
    applied["id"] = "fixture"
    flow["apply_first"] = applied
    moves1 = client.get(f"/sessions/{sid}/moves").json()
    flow["moves_after"] = moves1
    inv = next(m["index"] for m in moves1["moves"]
               if m["direction"] == "bwd"
               and m["ident"] == applied["applied"]["ident"]
               and m["label"] == applied["applied"]["label"])
    undone = client.post(f"/sessions/{sid}/moves/{inv}").json()
    undone["id"] = "fixture"
    flow["apply_inverse"] = undone
    flow["inverse_index"] = inv
    flow["moves_restored"] = client.get(f"/sessions/{sid}/moves").json()
    origin = client.get(f"/sessions/{sid}/origin").json()
    origin["id"] = "fixture"
    flow["origin"] = origin
    (OUT / f"{name}.json").write_text(json.dumps(flow, indent=2) + "\n")
    client.delete(f"/sessions/{sid}")
    print(f"recorded {name}: {len(moves0['moves'])} initial moves")


def record_section32(client: TestClient):
    """Reach the paper's mixed-direction state by replaying a then ~a."""
    created = client.post("/sessions",
                          json={"source": "a + b | ~a.c"}).json()
    sid = created["id"]
    client.post(f"/sessions/{sid}/moves/0")
    moves = client.get(f"/sessions/{sid}/moves").json()
    idx = next(m["index"] for m in moves["moves"]
               if m["label"] == "~a" and m["direction"] == "fwd")
    client.post(f"/sessions/{sid}/moves/{idx}")
    flow = {
        "state": client.get(f"/sessions/{sid}").json()["state"],
        "moves": client.get(f"/sessions/{sid}/moves").json(),
    }
    (OUT / "section32.json").write_text(json.dumps(flow, indent=2) + "\n")
    client.delete(f"/sessions/{sid}")
    print(f"recorded section32: {len(flow['moves']['moves'])} moves")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    client = TestClient(create_app())
    record_flow(client, "example4", "a + b | ~a.c")
    record_section32(client)


if __name__ == "__main__":
    main()
