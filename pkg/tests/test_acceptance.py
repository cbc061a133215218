"""Acceptance gate: one test (and one printed verdict line) per shipping criterion.

Run with `pytest -s tests/test_acceptance.py` to see the PASS lines; a
failing criterion shows up as an ordinary pytest failure for that test.
"""

import random
import time
from dataclasses import replace

import numpy as np
import pytest
from fastapi.testclient import TestClient
from scipy.io import wavfile

from adkit import data
from adkit.agent import (
    MockModelClient,
    ResponseRejectedError,
    ScriptReplaced,
    SessionState,
    make_raw_reply,
    parse_response,
    replay_transcript,
    run_command,
    score_corpus,
)
from adkit.gaps import AudioTrack, SilenceConfig, detect_silence, eligible_gaps
from adkit.mixdown import WavMixTool, write_wav_int16
from adkit.narration import SilenceBackend, SpeechRateModel, plan_cue, render_track
from adkit.script import (
    ADScript,
    Cue,
    Rule,
    normalize_script_text,
    parse_script,
    serialize_script,
    validate,
    word_budget,
)
from adkit.service import FileProjectStore, create_app, replay_log


def verdict(line: str) -> None:
    print(f"\nPASS {line}")


# -- (a) format round-trip ------------------------------------------------------


def test_a_format_round_trip():
    started = time.perf_counter()
    names = data.corpus_names()
    assert len(names) >= 20
    for name, doc in data.iter_corpus():
        assert serialize_script(parse_script(doc)) == normalize_script_text(doc), name
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    verdict(f"(a) format round-trip: {len(names)}/{len(names)} documents in {elapsed * 1000:.0f} ms")


# -- (b) rule enforcement --------------------------------------------------------


NO_GAP_COUNTEREXAMPLE = (
    "0 min 53 sec to 0 min 57 sec\nCredits begin to roll.\n\n"
    "0 min 57 sec to 1 min 0 sec\nThe studio logo fades in."
)


def _base_valid_script(rng: random.Random) -> ADScript:
    cues = []
    at = rng.randint(0, 4000)
    for _ in range(rng.randint(3, 8)):
        duration = rng.randint(3000, 6000)
        words = rng.randint(1, max(1, word_budget(duration)))
        text = " ".join(f"w{k}" for k in range(words))
        cues.append(Cue(at, at + duration, text))
        at += duration + rng.randint(2000, 4000)
    return ADScript(cues=tuple(cues))


def _inject_one(script: ADScript, rule: Rule, rng: random.Random):
    """Mutate exactly one spot; returns (script, duration_arg, expected_index)."""
    cues = list(script.cues)
    i = rng.randrange(1, len(cues))
    prev = cues[i - 1]
    if rule is Rule.MIN_GAP:
        new_start = prev.end_ms + rng.randint(0, 999)
        cues[i] = Cue(new_start, cues[i].end_ms, cues[i].text)
        return ADScript(cues=tuple(cues)), None, i
    if rule is Rule.OVERLAP:
        new_start = rng.randint(prev.start_ms + 1, prev.end_ms - 1)
        cues[i] = Cue(new_start, cues[i].end_ms, cues[i].text)
        return ADScript(cues=tuple(cues)), None, i
    if rule is Rule.UNSORTED:
        cues[i] = Cue(prev.start_ms, cues[i].end_ms, cues[i].text)
        return ADScript(cues=tuple(cues)), None, i
    if rule is Rule.EMPTY_TEXT:
        cues[i] = Cue(cues[i].start_ms, cues[i].end_ms, "")
        return ADScript(cues=tuple(cues)), None, i
    if rule is Rule.WORD_BUDGET:
        budget = word_budget(cues[i].duration_ms)
        text = " ".join(f"w{k}" for k in range(budget + rng.randint(1, 5)))
        cues[i] = Cue(cues[i].start_ms, cues[i].end_ms, text)
        return ADScript(cues=tuple(cues)), None, i
    if rule is Rule.DURATION_EXCEEDED:
        last = cues[-1]
        duration = rng.randint(max(cues[-2].end_ms, last.start_ms + 1), last.end_ms - 1)
        return ADScript(cues=tuple(cues)), duration, len(cues) - 1
    raise AssertionError(rule)


def test_b_rule_enforcement():
    found = validate(parse_script(NO_GAP_COUNTEREXAMPLE))
    assert len(found) == 1
    assert found[0].rule is Rule.MIN_GAP

    rng = random.Random(20260818)
    injectable = [Rule.MIN_GAP, Rule.OVERLAP, Rule.UNSORTED, Rule.EMPTY_TEXT,
                  Rule.WORD_BUDGET, Rule.DURATION_EXCEEDED]
    runs = 1200
    for _ in range(runs):
        base = _base_valid_script(rng)
        assert validate(base) == []
        rule = rng.choice(injectable)
        mutated, duration, index = _inject_one(base, rule, rng)
        flagged = validate(mutated, duration)
        assert len(flagged) == 1, (rule, flagged)
        assert flagged[0].rule is rule
        assert flagged[0].cue_index == index
    verdict(f"(b) rule enforcement: no-gap counterexample flagged once; {runs}/{runs} fuzz runs one-injected-one-flagged")


# -- (c) word budget -------------------------------------------------------------


def test_c_word_budget():
    assert word_budget(3000) == 9
    assert word_budget(1000) == 3
    verdict("(c) word budget: 3 s -> 9 words, 1 s -> 3 words")


# -- (d) gap-detection oracle -----------------------------------------------------


def test_d_gap_detection_oracle():
    started = time.perf_counter()
    rng = np.random.default_rng(411)
    rates = [8000, 16000, 22050, 24000, 44100]
    checked_boundaries = 0
    for fixture in range(10):
        rate = rates[fixture % len(rates)]
        channels = 1 + fixture % 2
        total_s = 40
        frames = rate * total_s
        loud = rng.uniform(0.2, 0.6, (frames, channels)).astype(np.float64)
        loud *= np.sign(rng.standard_normal((frames, channels)))

        # ground truth: three long silences and one too-short one
        silences = [(2.0, 7.5), (12.0, 18.0), (25.0, 33.5)]
        short = (36.0, 37.5)
        for start_s, end_s in silences + [short]:
            loud[int(start_s * rate): int(end_s * rate)] *= 0.001

        track = AudioTrack(samples=loud if channels > 1 else loud[:, 0], sample_rate=rate)
        detected = detect_silence(track)
        for start_s, end_s in silences:
            hit = [g for g in detected if abs(g.start_ms - start_s * 1000) <= 50
                   and abs(g.end_ms - end_s * 1000) <= 50]
            assert len(hit) == 1, (fixture, start_s, end_s, detected)
            checked_boundaries += 2
        eligible = eligible_gaps(detected)
        assert all(g.duration_ms >= 3000 for g in eligible)
        assert not any(abs(g.start_ms - short[0] * 1000) <= 100 for g in eligible)
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0
    verdict(f"(d) gap detection: 10 fixtures, {checked_boundaries} boundaries within ±50 ms, eligibility ≥3 s, {elapsed:.2f} s")


# -- (e) agent replay --------------------------------------------------------------


def test_e_agent_replay():
    state, results = replay_transcript(data.load_transcript("clara"))
    assert all(r.ok for r in results)
    slipper = [c for c in state.script.cues if c.start_ms == 8000 and c.end_ms == 12000]
    assert len(slipper) == 1

    rename_state, rename_results = replay_transcript(data.load_transcript("rename"))
    ev = next(e for e in rename_results[1].events if isinstance(e, ScriptReplaced))
    assert len(ev.changes) == 6
    assert all(c.kind == "text-changed" for c in ev.changes)

    metrics = score_corpus(data.load_response_corpus())
    assert (metrics.total, metrics.action_responses, metrics.vqa_responses) == (202, 134, 68)
    assert (metrics.incongruent, metrics.vqa_errors, metrics.flagged) == (18, 4, 22)
    assert round(100 * metrics.flagged_rate, 1) == 10.9
    verdict("(e) agent replay: slipper cue at [8 s, 12 s]; rename diff = 6 text-changed; corpus 18+4 of 202 (10.9%)")


# -- (f) atomicity -----------------------------------------------------------------


def _random_pre_state(rng: random.Random) -> SessionState:
    base = _base_valid_script(random.Random(rng.randint(0, 10**9)))
    duration = (base.cues[-1].end_ms if base.cues else 10_000) + 10_000
    return SessionState(
        script=base,
        playhead_ms=rng.randint(0, duration),
        current_line=rng.randint(1, max(base.line_count(), 1)),
        video_url="file:///clip.mp4",
        video_duration_ms=duration,
    )


def _fault_reply(kind: str, state: SessionState, rng: random.Random) -> str:
    if kind == "malformed":
        sample = make_raw_reply("x", "y")
        return rng.choice(["utter nonsense", sample[: len(sample) // 2], '["a", "list"]'])
    if kind == "overlap":
        doc = "0 min 1 sec to 0 min 9 sec\nOne thing.\n\n0 min 4 sec to 0 min 12 sec\nAnother thing."
        return make_raw_reply("x", "y", new_script_text=doc)
    if kind == "unrepairable":
        doc = "0 min 1 sec to 0 min 2 sec\nBlink.\n\n0 min 2 sec to 0 min 5 sec\nStare."
        return make_raw_reply("x", "y", new_script_text=doc)
    if kind == "past_end":
        end_s = (state.video_duration_ms // 1000) + 10
        doc = f"0 min 1 sec to {end_s // 60} min {end_s % 60} sec\nRuns long."
        return make_raw_reply("x", "y", new_script_text=doc)
    if kind == "bad_jump":
        return make_raw_reply("x", "y", new_timestamp_s=state.video_duration_ms // 1000 + 60)
    raise AssertionError(kind)


def test_f_atomicity(monkeypatch):
    rng = random.Random(97)
    kinds = ["malformed", "overlap", "unrepairable", "past_end", "bad_jump", "mid_apply_crash"]
    trials = 600
    failures_checked = 0
    for trial in range(trials):
        pre = _random_pre_state(rng)
        kind = kinds[trial % len(kinds)]
        if kind == "mid_apply_crash":
            # a crash between validation and commit must not leak a half-applied state
            from adkit.agent import orchestrator

            def boom(old, new):
                raise RuntimeError("injected crash")

            monkeypatch.setattr(orchestrator, "diff", boom)
            reply = make_raw_reply("x", "y", new_script_text=serialize_script(pre.script))
            with pytest.raises(RuntimeError):
                run_command(pre, "do it", MockModelClient([reply]))
            monkeypatch.undo()
            post = pre
        else:
            replies = [_fault_reply(kind, pre, rng)]
            if kind == "malformed":
                replies.append(_fault_reply(kind, pre, rng))
            result = run_command(pre, "do it", MockModelClient(replies))
            assert not result.ok, kind
            post = result.state
        assert replace(post, history=()) == replace(pre, history=()), kind
        failures_checked += 1
    verdict(f"(f) atomicity: {failures_checked}/{trials} injected failures left state untouched (modulo history)")


# -- (g) narration fit --------------------------------------------------------------


def test_g_narration_fit():
    ten_words = " ".join(f"w{k}" for k in range(10))
    assert plan_cue(Cue(0, 6000, ten_words)).rate_factor == 1.0
    assert plan_cue(Cue(0, 6000, ten_words)).fits
    assert plan_cue(Cue(0, 4000, ten_words)).rate_factor == pytest.approx(1.5)
    two_s = plan_cue(Cue(0, 2000, ten_words))
    assert two_s.rate_factor == 2.0
    assert not two_s.fits

    model = SpeechRateModel()
    rng = random.Random(5150)
    pairs = 10_000
    ones = 0
    for _ in range(pairs):
        words = rng.randint(1, 40)
        slot = rng.randint(500, 15_000)
        text = " ".join(f"w{k}" for k in range(words))
        plan = plan_cue(Cue(1000, 1000 + slot, text), model)
        if plan.required_ms <= slot:
            assert plan.rate_factor == 1.0, (words, slot)
            ones += 1
        else:
            assert plan.rate_factor > 1.0
    assert ones > 0
    verdict(f"(g) narration fit: pinned 6 s/4 s/2 s cases; rate==1.0 in {ones} fitting of {pairs} random pairs")


# -- (h) mix correctness --------------------------------------------------------------


def test_h_mix_correctness(tmp_path):
    rate = 22_050
    total_s = 20
    t = np.arange(rate * total_s) / rate
    tone = 0.5 * np.sin(2 * np.pi * 440 * t)
    src = tmp_path / "program.wav"
    write_wav_int16(src, tone, rate)

    script = parse_script("0 min 5 sec to 0 min 9 sec\nShe crosses the empty courtyard quietly.")
    timeline = render_track(script, SilenceBackend())
    out = tmp_path / "mixed.wav"
    WavMixTool().mix(src, timeline, out)

    got_rate, got = wavfile.read(str(out))
    got = got.astype(np.float64) / 32767.0
    assert got_rate == rate
    duration_error_ms = abs(got.size - tone.size) / rate * 1000
    assert duration_error_ms <= 100

    clip_ms = timeline.clips[0].clip.duration_ms
    band = slice(int((5.0 + 0.2) * rate), int((5.0 + clip_ms / 1000 - 0.2) * rate))
    rms_in = np.sqrt(np.mean(np.square(tone[band])))
    rms_out = np.sqrt(np.mean(np.square(got[band])))
    ducked_db = 20 * np.log10(rms_out / rms_in)
    target_db = 20 * np.log10(timeline.mix.ducking_level)
    assert abs(ducked_db - target_db) <= 1.0
    verdict(f"(h) mix correctness: ducked band at {ducked_db:.2f} dB (target {target_db:.2f} ±1); duration off by {duration_error_ms:.1f} ms")


# -- (i) replay determinism --------------------------------------------------------------


def _drive_service_session(tmp_path, name: str):
    transcript = data.load_transcript(name)
    store = FileProjectStore(tmp_path / f"store-{name}")
    mock = MockModelClient([t["rawResponse"] for t in transcript])
    app = create_app(store, client_factory=lambda tier: mock)
    client = TestClient(app)
    pid = client.post("/projects", json={"videoUrl": "bundled://video", "videoDurationMs": 60_000}).json()["id"]
    for turn in transcript:
        out = client.post(f"/projects/{pid}/commands", json={"command": turn["command"]}).json()
        assert out["ok"], out
    return store, pid


def test_i_replay_determinism(tmp_path):
    sessions = 0
    for name in ("clara", "rename"):
        store, pid = _drive_service_session(tmp_path, name)
        rows = store.read_log(pid)
        final_revision = store.revisions(pid)[-1][1]
        first = serialize_script(replay_log(rows).script)
        second = serialize_script(replay_log(rows).script)
        assert first == final_revision
        assert second == final_revision
        sessions += 1
    verdict(f"(i) replay determinism: {sessions} session logs reconstruct their final revision byte-identically")
