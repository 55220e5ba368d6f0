import pytest
from fastapi.testclient import TestClient

from revccs.service import create_app


@pytest.fixture
def client():
    return TestClient(create_app())


def make_session(client, source="a + b | ~a.c", **flags):
    resp = client.post("/sessions", json={"source": source, **flags})
    assert resp.status_code == 201, resp.text
    return resp.json()


class TestCreate:
    def test_example4_initial_state(self, client):
        body = make_session(client)
        st = body["state"]
        assert st["seed"] == "((0,2),(1,2))"
        assert st["memory"] == "[<>, <>]"
        assert st["process"] == "a + b | ~a.c"
        assert st["initial"] is True

    def test_inert_term(self, client):
        body = make_session(client, source="0")
        sid = body["id"]
        moves = client.get(f"/sessions/{sid}/moves").json()
        assert moves["moves"] == []

    def test_parse_error_is_422(self, client):
        resp = client.post("/sessions", json={"source": "a.."})
        assert resp.status_code == 422
        assert resp.json()["code"] == "parse-error"
        assert "expected" in resp.json()["message"]

    def test_bad_policy_rejected(self, client):
        resp = client.post("/sessions", json={"source": "a",
                                              "replication_policy": "C"})
        assert resp.status_code == 422


class TestMoves:
    def test_example4_moves_and_matrix(self, client):
        sid = make_session(client)["id"]
        body = client.get(f"/sessions/{sid}/moves").json()
        moves = body["moves"]
        assert [(m["ident"], m["label"]) for m in moves] == [
            ("#0", "a"), ("#0", "b"), ("#1", "~a"), ("#0(+)#1", "tau")]
        mx = body["concurrency"]
        true_pairs = {(i, j) for i in range(4) for j in range(4)
                      if mx[i][j] is True}
        assert true_pairs == {(0, 2), (2, 0), (1, 2), (2, 1)}

    def test_section32_moves(self, client):
        sid = make_session(client)["id"]
        # drive to the section-3.2 state: a then ~a... apply move 0 (a), then ~a
        client.post(f"/sessions/{sid}/moves/0")
        body = client.get(f"/sessions/{sid}/moves").json()
        idx = next(m["index"] for m in body["moves"]
                   if m["label"] == "~a" and m["direction"] == "fwd")
        client.post(f"/sessions/{sid}/moves/{idx}")
        body = client.get(f"/sessions/{sid}/moves").json()
        kinds = [(m["direction"], m["label"]) for m in body["moves"]]
        assert kinds == [("fwd", "c"), ("bwd", "a"), ("bwd", "~a")]

    def test_apply_then_inverse_restores(self, client):
        sid = make_session(client)["id"]
        before = client.get(f"/sessions/{sid}").json()["state"]
        applied = client.post(f"/sessions/{sid}/moves/0").json()
        moves = client.get(f"/sessions/{sid}/moves").json()["moves"]
        inv = next(m["index"] for m in moves
                   if m["direction"] == "bwd"
                   and m["ident"] == applied["applied"]["ident"])
        client.post(f"/sessions/{sid}/moves/{inv}")
        after = client.get(f"/sessions/{sid}").json()["state"]
        assert after == before

    def test_stale_fingerprint_conflicts(self, client):
        sid = make_session(client)["id"]
        fp = client.get(f"/sessions/{sid}/moves").json()["fingerprint"]
        client.post(f"/sessions/{sid}/moves/0")
        resp = client.post(f"/sessions/{sid}/moves/0",
                           params={"fingerprint": fp})
        assert resp.status_code == 409
        assert resp.json()["code"] == "stale-move"

    def test_out_of_range_index(self, client):
        sid = make_session(client)["id"]
        resp = client.post(f"/sessions/{sid}/moves/99")
        assert resp.status_code == 409


class TestOriginTraceLifecycle:
    def test_origin_does_not_mutate(self, client):
        sid = make_session(client)["id"]
        client.post(f"/sessions/{sid}/moves/0")
        cur = client.get(f"/sessions/{sid}").json()["state"]
        og = client.get(f"/sessions/{sid}/origin").json()["origin"]
        assert og["initial"] is True
        assert client.get(f"/sessions/{sid}").json()["state"] == cur

    def test_trace_roundtrip_via_reload(self, client):
        sid = make_session(client)["id"]
        client.post(f"/sessions/{sid}/moves/0")
        client.post(f"/sessions/{sid}/moves/0")
        text = client.get(f"/sessions/{sid}/trace").text
        body = client.post("/sessions", json={"trace": text}).json()
        reloaded = body["state"]
        assert reloaded == client.get(f"/sessions/{sid}").json()["state"]

    def test_history_replays_to_current(self, client):
        from revccs.irlts import parse_trace
        sid = make_session(client)["id"]
        for _ in range(3):
            client.post(f"/sessions/{sid}/moves/0")
        text = client.get(f"/sessions/{sid}/trace").text
        assert parse_trace(text).target is not None  # composability validated

    def test_delete_then_404(self, client):
        sid = make_session(client)["id"]
        assert client.delete(f"/sessions/{sid}").status_code == 204
        assert client.get(f"/sessions/{sid}").status_code == 404
        assert client.get(f"/sessions/{sid}").json()["code"] == "unknown-session"

    def test_replication_session(self, client):
        sid = make_session(client, source="a.!b",
                           replication_policy="A")["id"]
        client.post(f"/sessions/{sid}/moves/0")
        moves = client.get(f"/sessions/{sid}/moves").json()["moves"]
        assert any(m["label"] == "b" for m in moves)

    def test_memory_shrinks_on_undo(self, client):
        sid = make_session(client)["id"]
        client.post(f"/sessions/{sid}/moves/0")
        moves = client.get(f"/sessions/{sid}/moves").json()["moves"]
        bwd = next(m for m in moves if m["direction"] == "bwd")
        assert bwd["target"]["memory"].count("<#") < \
            client.get(f"/sessions/{sid}").json()["state"]["memory"].count("<#")
