"""Service tests: REST surface, durability, logs, announcements, replays."""

import io
import json
import threading

import numpy as np
import pytest
from fastapi.testclient import TestClient
from scipy.io import wavfile

from adkit import data
from adkit.agent import MockModelClient, make_raw_reply
from adkit.service import FileProjectStore, announce_playback, create_app, format_position, replay_log
from adkit.script import parse_script, serialize_script

TWO_CUES = "0 min 2 sec to 0 min 6 sec\nA door opens slowly.\n\n0 min 9 sec to 0 min 14 sec\nShe steps into the hallway."


def make_client(tmp_path, replies=None, **app_kw):
    store = FileProjectStore(tmp_path / "store")
    factory = None
    if replies is not None:
        mock = MockModelClient(list(replies))
        factory = lambda tier: mock
    app = create_app(store, client_factory=factory, **app_kw)
    return TestClient(app), store


def new_project(client, **overrides):
    body = {"videoUrl": "file:///clip.mp4", "videoDurationMs": 60_000}
    body.update(overrides)
    resp = client.post("/projects", json=body)
    assert resp.status_code == 201, resp.text
    return resp.json()["id"]


class TestProjects:
    def test_create_and_fetch(self, tmp_path):
        client, _ = make_client(tmp_path)
        pid = new_project(client)
        assert pid == "p0001"
        got = client.get(f"/projects/{pid}").json()
        assert got["videoUrl"] == "file:///clip.mp4"
        assert got["revision"] == 0
        assert got["scriptText"] == ""

    def test_ids_are_sequential(self, tmp_path):
        client, _ = make_client(tmp_path)
        assert [new_project(client) for _ in range(3)] == ["p0001", "p0002", "p0003"]

    def test_unknown_project_404(self, tmp_path):
        client, _ = make_client(tmp_path)
        resp = client.get("/projects/p9999")
        assert resp.status_code == 404
        assert resp.json()["error"] == "UNKNOWN_PROJECT"

    def test_listing(self, tmp_path):
        client, _ = make_client(tmp_path)
        new_project(client)
        new_project(client)
        listed = client.get("/projects").json()["projects"]
        assert [p["id"] for p in listed] == ["p0001", "p0002"]
        assert all("history" not in p for p in listed)

    def test_restart_durability(self, tmp_path):
        client, store = make_client(tmp_path)
        pid = new_project(client)
        client.put(f"/projects/{pid}/script", json={"text": TWO_CUES})
        # a second app over the same directory sees everything
        reopened = TestClient(create_app(FileProjectStore(tmp_path / "store")))
        got = reopened.get(f"/projects/{pid}/script").json()
        assert got["text"] == TWO_CUES
        assert got["revision"] == 1


class TestScriptEndpoints:
    def test_put_and_get_roundtrip(self, tmp_path):
        client, _ = make_client(tmp_path)
        pid = new_project(client)
        put = client.put(f"/projects/{pid}/script", json={"text": TWO_CUES})
        assert put.status_code == 200
        assert put.json()["changed"] is True
        assert put.json()["revision"] == 1
        got = client.get(f"/projects/{pid}/script").json()
        assert got["text"] == TWO_CUES

    def test_put_canonicalizes_tolerant_spelling(self, tmp_path):
        client, _ = make_client(tmp_path)
        pid = new_project(client)
        loose = "0 mins 2 secs to 0 min 6 s\nA door opens slowly."
        put = client.put(f"/projects/{pid}/script", json={"text": loose}).json()
        assert put["text"] == "0 min 2 sec to 0 min 6 sec\nA door opens slowly."

    def test_put_noop_does_not_bump_revision(self, tmp_path):
        client, _ = make_client(tmp_path)
        pid = new_project(client)
        client.put(f"/projects/{pid}/script", json={"text": TWO_CUES})
        again = client.put(f"/projects/{pid}/script", json={"text": TWO_CUES}).json()
        assert again["changed"] is False
        assert again["revision"] == 1
        revisions = client.get(f"/projects/{pid}/revisions").json()["revisions"]
        assert [r["revision"] for r in revisions] == [0, 1]

    def test_put_blocking_violation_422(self, tmp_path):
        client, _ = make_client(tmp_path)
        pid = new_project(client)
        no_gap = "0 min 53 sec to 0 min 57 sec\nCredits roll.\n\n0 min 57 sec to 0 min 59 sec\nLogo fades."
        resp = client.put(f"/projects/{pid}/script", json={"text": no_gap})
        assert resp.status_code == 422
        rules = [v["rule"] for v in resp.json()["violations"]]
        assert rules == ["MIN_GAP"]

    def test_put_malformed_422(self, tmp_path):
        client, _ = make_client(tmp_path)
        pid = new_project(client)
        resp = client.put(f"/projects/{pid}/script", json={"text": "not a script"})
        assert resp.status_code == 422
        assert resp.json()["violations"][0]["rule"] == "MALFORMED_TIMESTAMP"

    def test_put_past_video_end_422(self, tmp_path):
        client, _ = make_client(tmp_path)
        pid = new_project(client, videoDurationMs=10_000)
        doc = "0 min 2 sec to 0 min 20 sec\nRuns long."
        resp = client.put(f"/projects/{pid}/script", json={"text": doc})
        assert resp.status_code == 422
        assert resp.json()["violations"][0]["rule"] == "DURATION_EXCEEDED"

    def test_warnings_survive_put(self, tmp_path):
        client, _ = make_client(tmp_path)
        pid = new_project(client)
        wordy = "0 min 2 sec to 0 min 4 sec\n" + " ".join(["word"] * 30)
        put = client.put(f"/projects/{pid}/script", json={"text": wordy})
        assert put.status_code == 200
        assert [v["rule"] for v in put.json()["violations"]] == ["WORD_BUDGET"]


class TestCommands:
    def test_no_backend_503(self, tmp_path):
        client, _ = make_client(tmp_path)
        pid = new_project(client)
        resp = client.post(f"/projects/{pid}/commands", json={"command": "Summarize."})
        assert resp.status_code == 503
        assert resp.json()["error"] == "MODEL_UNAVAILABLE"

    def test_command_applies_script(self, tmp_path):
        raw = make_raw_reply("Generate.", "Here you go.", new_script_text=TWO_CUES)
        client, _ = make_client(tmp_path, replies=[raw])
        pid = new_project(client)
        resp = client.post(f"/projects/{pid}/commands", json={"command": "Generate."})
        assert resp.status_code == 200
        body = resp.json()
        assert body["ok"] is True
        assert [e["kind"] for e in body["events"]] == ["TextSpoken", "ScriptReplaced"]
        assert body["project"]["scriptText"] == TWO_CUES
        assert body["project"]["revision"] == 1

    def test_failed_command_keeps_revision(self, tmp_path):
        client, _ = make_client(tmp_path, replies=["junk", "more junk"])
        pid = new_project(client)
        body = client.post(f"/projects/{pid}/commands", json={"command": "x"}).json()
        assert body["ok"] is False
        assert body["error"] == "SCHEMA_FAILURE_AFTER_RETRY"
        assert body["attempts"] == 2
        assert body["project"]["revision"] == 0
        # failure still lands in the conversation history
        assert body["project"]["historyLength"] == 2

    def test_command_log_row_written(self, tmp_path):
        raw = make_raw_reply("Go.", "Jumping.", new_timestamp_s=30)
        client, store = make_client(tmp_path, replies=[raw])
        pid = new_project(client)
        client.post(f"/projects/{pid}/commands", json={"command": "Go."})
        rows = store.read_log(pid)
        assert rows[-1]["kind"] == "command"
        assert rows[-1]["ok"] is True
        assert rows[-1]["appliedEvents"] == ["TextSpoken", "TimestampJumped"]

    def test_stream_variant_emits_sse(self, tmp_path):
        raw = make_raw_reply("Generate.", "Done.", new_script_text=TWO_CUES)
        client, _ = make_client(tmp_path, replies=[raw])
        pid = new_project(client)
        resp = client.post(f"/projects/{pid}/commands/stream", json={"command": "Generate."})
        assert resp.status_code == 200
        assert resp.headers["content-type"].startswith("text/event-stream")
        blocks = [b for b in resp.text.split("\n\n") if b.strip()]
        kinds = [b.split("\n")[0].removeprefix("event: ") for b in blocks]
        assert kinds == ["TextSpoken", "ScriptReplaced", "result"]
        final = json.loads(blocks[-1].split("\n", 1)[1].removeprefix("data: "))
        assert final["ok"] is True

    def test_ask_only_suggestion_flow(self, tmp_path):
        raw = make_raw_reply("Edit.", "Here is a draft.", new_script_text=TWO_CUES)
        client, _ = make_client(tmp_path, replies=[raw])
        pid = new_project(client, askOnly=True)
        body = client.post(f"/projects/{pid}/commands", json={"command": "Edit."}).json()
        assert [e["kind"] for e in body["events"]] == ["TextSpoken", "SuggestionPending"]
        assert body["project"]["scriptText"] == ""
        assert body["project"]["pendingSuggestion"] == TWO_CUES
        accepted = client.post(f"/projects/{pid}/suggestion", json={"accept": True}).json()
        assert accepted["scriptText"] == TWO_CUES
        assert accepted["revision"] == 1
        assert accepted["pendingSuggestion"] is None

    def test_suggestion_reject_discards(self, tmp_path):
        raw = make_raw_reply("Edit.", "Draft.", new_script_text=TWO_CUES)
        client, _ = make_client(tmp_path, replies=[raw])
        pid = new_project(client, askOnly=True)
        client.post(f"/projects/{pid}/commands", json={"command": "Edit."})
        rejected = client.post(f"/projects/{pid}/suggestion", json={"accept": False}).json()
        assert rejected["scriptText"] == ""
        assert rejected["pendingSuggestion"] is None
        again = client.post(f"/projects/{pid}/suggestion", json={"accept": True})
        assert again.status_code == 409

    def test_settings_toggle(self, tmp_path):
        client, _ = make_client(tmp_path)
        pid = new_project(client)
        out = client.put(f"/projects/{pid}/settings", json={"askOnly": True}).json()
        assert out["askOnly"] is True

    def test_single_writer_under_concurrency(self, tmp_path):
        replies = [make_raw_reply("x", f"reply {i}") for i in range(16)]
        client, store = make_client(tmp_path, replies=replies)
        pid = new_project(client)
        errors = []

        def worker():
            try:
                r = client.post(f"/projects/{pid}/commands", json={"command": "x"})
                assert r.status_code == 200
            except Exception as exc:  # pragma: no cover
                errors.append(exc)

        threads = [threading.Thread(target=worker) for _ in range(16)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors
        rec = store.load(pid)
        # 16 commands, two turns each, no lost updates
        assert len(rec.history) == 32
        seqs = [row["seq"] for row in store.read_log(pid)]
        assert seqs == list(range(1, len(seqs) + 1))


class TestPlayback:
    def test_position_formatting(self):
        assert format_position(0) == "0 seconds"
        assert format_position(1_000) == "1 second"
        assert format_position(45_000) == "45 seconds"
        assert format_position(94_000) == "1 min 34 sec"
        assert format_position(59_499) == "59 seconds"
        assert format_position(59_500) == "1 min 0 sec"

    def test_announcement_wording(self):
        assert announce_playback("paused", 94_000) == "Paused at 1 min 34 sec"
        assert announce_playback("resumed", 30_000) == "Playing at 30 seconds"
        assert announce_playback("jumpedForward", 35_000) == "Forward to 35 seconds"
        assert announce_playback("jumpedBack", 25_000) == "Back to 25 seconds"

    def test_endpoint_updates_playhead(self, tmp_path):
        client, store = make_client(tmp_path)
        pid = new_project(client)
        out = client.post(f"/projects/{pid}/playback", json={"kind": "paused", "positionMs": 94_000})
        assert out.status_code == 200
        # clamped to the video's end
        assert out.json() == {"announcement": "Paused at 1 min 0 sec", "playheadMs": 60_000}
        out2 = client.post(f"/projects/{pid}/playback", json={"kind": "jumpedBack", "positionMs": 12_000}).json()
        assert out2["announcement"] == "Back to 12 seconds"
        assert store.load(pid).playhead_ms == 12_000

    def test_unknown_kind_rejected(self, tmp_path):
        client, _ = make_client(tmp_path)
        pid = new_project(client)
        resp = client.post(f"/projects/{pid}/playback", json={"kind": "scrubbed", "positionMs": 0})
        assert resp.status_code == 422


class TestAdTrackAndExport:
    def test_json_timeline(self, tmp_path):
        client, _ = make_client(tmp_path)
        pid = new_project(client)
        client.put(f"/projects/{pid}/script", json={"text": TWO_CUES})
        out = client.post(f"/projects/{pid}/ad-track", json={"format": "json"}).json()
        assert [c["cueIndex"] for c in out["clips"]] == [0, 1]
        assert out["clips"][0]["offsetMs"] == 2000
        assert out["unfittable"] == []
        assert out["duckingLevel"] == pytest.approx(0.2)

    def test_wav_track_length_matches_video(self, tmp_path):
        client, _ = make_client(tmp_path)
        pid = new_project(client)
        client.put(f"/projects/{pid}/script", json={"text": TWO_CUES})
        resp = client.post(f"/projects/{pid}/ad-track", json={"format": "wav", "sampleRate": 24_000})
        assert resp.headers["content-type"] == "audio/wav"
        rate, samples = wavfile.read(io.BytesIO(resp.content))
        assert rate == 24_000
        assert abs(samples.size / rate - 60.0) < 0.01

    def test_placeholder_cue_rejected(self, tmp_path):
        client, _ = make_client(tmp_path)
        pid = new_project(client)
        client.put(f"/projects/{pid}/script", json={"text": "0 min 2 sec to 0 min 6 sec\n[describe]"})
        resp = client.post(f"/projects/{pid}/ad-track", json={})
        assert resp.status_code == 422
        assert resp.json()["error"] == "EMPTY_NARRATION"

    def test_export_over_wav_source(self, tmp_path):
        client, _ = make_client(tmp_path)
        pid = new_project(client)
        client.put(f"/projects/{pid}/script", json={"text": TWO_CUES})
        rate = 16_000
        program = (np.sin(2 * np.pi * 220 * np.arange(rate * 20) / rate) * 0.5)
        src = tmp_path / "program.wav"
        wavfile.write(str(src), rate, (program * 32767).astype(np.int16))
        out_path = tmp_path / "mixed.wav"
        resp = client.post(f"/projects/{pid}/export",
                           json={"sourcePath": str(src), "outPath": str(out_path)})
        assert resp.status_code == 200, resp.text
        assert resp.json()["tool"] == "WavMixTool"
        got_rate, got = wavfile.read(str(out_path))
        assert got_rate == rate and got.size == program.size

    def test_export_missing_source(self, tmp_path):
        client, _ = make_client(tmp_path)
        pid = new_project(client)
        resp = client.post(f"/projects/{pid}/export",
                           json={"sourcePath": str(tmp_path / "nope.wav"), "outPath": str(tmp_path / "o.wav")})
        assert resp.status_code == 422
        assert resp.json()["error"] == "SOURCE_NOT_FOUND"


class TestLogsAndReplay:
    def run_session(self, tmp_path):
        transcript = data.load_transcript("clara")
        client, store = make_client(tmp_path, replies=[t["rawResponse"] for t in transcript])
        pid = new_project(client)
        client.put(f"/projects/{pid}/settings", json={"askOnly": False})
        for turn in transcript:
            out = client.post(f"/projects/{pid}/commands", json={"command": turn["command"]}).json()
            assert out["ok"], out["error"]
        client.post(f"/projects/{pid}/playback", json={"kind": "paused", "positionMs": 12_000})
        return client, store, pid

    def test_log_is_jsonl(self, tmp_path):
        client, _, pid = self.run_session(tmp_path)
        resp = client.get(f"/projects/{pid}/logs")
        assert resp.status_code == 200
        rows = [json.loads(line) for line in resp.text.splitlines()]
        assert rows[0]["kind"] == "created"
        assert [r["seq"] for r in rows] == list(range(1, len(rows) + 1))

    def test_replay_reconstructs_final_revision(self, tmp_path):
        client, store, pid = self.run_session(tmp_path)
        rows = store.read_log(pid)
        state = replay_log(rows)
        revisions = store.revisions(pid)
        assert serialize_script(state.script) == revisions[-1][1]
        assert state.playhead_ms == 12_000

    def test_replay_matches_each_revision_count(self, tmp_path):
        client, store, pid = self.run_session(tmp_path)
        # Clara makes two script changes: generation, then one edit
        assert [n for n, _ in store.revisions(pid)] == [0, 1, 2]

    def test_replay_is_deterministic(self, tmp_path):
        _, store, pid = self.run_session(tmp_path)
        rows = store.read_log(pid)
        a = serialize_script(replay_log(rows).script)
        b = serialize_script(replay_log(rows).script)
        assert a == b

    def test_replay_honors_suggestions(self, tmp_path):
        raw = make_raw_reply("Edit.", "Draft.", new_script_text=TWO_CUES)
        client, store = make_client(tmp_path, replies=[raw])
        pid = new_project(client, askOnly=True)
        client.post(f"/projects/{pid}/commands", json={"command": "Edit."})
        client.post(f"/projects/{pid}/suggestion", json={"accept": True})
        state = replay_log(store.read_log(pid))
        assert serialize_script(state.script) == TWO_CUES


class TestHealth:
    def test_health(self, tmp_path):
        client, _ = make_client(tmp_path)
        out = client.get("/health").json()
        assert out["status"] == "ok"
        assert out["templateVersion"] == "v1"
