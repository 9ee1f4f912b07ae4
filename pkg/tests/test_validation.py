from __future__ import annotations

import pytest

from hrc.parsing import Action, Ambiguity, ParsedIntent
from hrc.scene import ObjectKind, apply_install, available
from hrc.validation import (
    ContractError,
    Verdict,
    enumerate_verdicts,
    validate,
    validate_pair,
    verdict_table_csv,
)


# ---------------------------------------------------------------------------
# Independent oracle: a direct transcription of the siting rules, written
# separately from the validator (no precedence machinery, no suggestions).
# ---------------------------------------------------------------------------

def oracle_verdict(scene, panel_id: int, stud_id: int) -> Verdict:
    panel = scene.get(panel_id)
    stud = scene.get(stud_id)
    if panel is None or stud is None:
        return Verdict.MATERIAL_NOT_PRESENT
    if panel.installed_on is not None or stud.occupied_by is not None:
        return Verdict.ALREADY_INSTALLED
    if stud.allowed_panel_size is None:
        return Verdict.MISMATCHED_PAIRING
    if panel.size_ft != stud.allowed_panel_size:
        return Verdict.MISMATCHED_PAIRING
    return Verdict.OK


def install_key(scene):
    return frozenset(
        (p.id, p.installed_on) for p in scene.panels() if p.installed_on is not None
    )


def reachable_scenes(fresh):
    """Every scene reachable through validated installs from the fresh scene."""
    seen = {install_key(fresh): fresh}
    frontier = [fresh]
    while frontier:
        scene = frontier.pop()
        for panel in available(scene, ObjectKind.PANEL):
            for stud in available(scene, ObjectKind.STUD):
                if oracle_verdict(scene, panel.id, stud.id) is Verdict.OK:
                    successor = apply_install(scene, panel.id, stud.id)
                    key = install_key(successor)
                    if key not in seen:
                        seen[key] = successor
                        frontier.append(successor)
    return list(seen.values())


def intent_for(panel_id: int, stud_id: int) -> ParsedIntent:
    return ParsedIntent(
        action=Action.PICK_PLACE,
        target_refs=(panel_id,),
        destination_refs=(stud_id,),
    )


# ---------------------------------------------------------------------------
# Spec examples
# ---------------------------------------------------------------------------

def test_validate_ok_pair(scene):
    result = validate_pair(scene, 504, 606)
    assert result.verdict is Verdict.OK
    assert "504" in result.explanation and "606" in result.explanation


def test_validate_mismatch_plain_stud(scene):
    result = validate_pair(scene, 504, 605)
    assert result.verdict is Verdict.MISMATCHED_PAIRING
    assert result.suggestions == (606,)


def test_validate_mismatch_wrong_size(scene):
    result = validate_pair(scene, 502, 606)
    assert result.verdict is Verdict.MISMATCHED_PAIRING
    assert result.suggestions == (602, 604, 608)


def test_validate_already_installed_cites_occupant(scene):
    occupied = apply_install(scene, 503, 608)
    result = validate_pair(occupied, 501, 608)
    assert result.verdict is Verdict.ALREADY_INSTALLED
    assert "503" in result.explanation
    assert set(result.suggestions) <= {602, 604}


def test_validate_target_already_installed(scene):
    installed = apply_install(scene, 504, 606)
    result = validate_pair(installed, 504, 602)
    assert result.verdict is Verdict.ALREADY_INSTALLED
    assert "504" in result.explanation
    # alternatives are free panels that fit stud 602 (4 by 8)
    assert set(result.suggestions) == {501, 502, 503}


def test_validate_unknown_id(scene):
    intent = ParsedIntent(
        action=Action.PICK_PLACE,
        target_refs=(999,),
        destination_refs=(602,),
        unknown_refs=(999,),
    )
    result = validate(scene, intent)
    assert result.verdict is Verdict.MATERIAL_NOT_PRESENT
    assert "999" in result.explanation


def test_validate_conflicting_targets(scene):
    intent = ParsedIntent(
        action=Action.PICK_PLACE,
        target_refs=(501, 502),
        destination_refs=(602,),
        ambiguity=Ambiguity.CONFLICTING_TARGETS,
    )
    result = validate(scene, intent)
    assert result.verdict is Verdict.PARTIAL_OR_DUPLICATE
    assert "501" in result.explanation and "502" in result.explanation


def test_validate_missing_pieces(scene):
    intent = ParsedIntent(
        action=Action.PICK_PLACE,
        target_refs=(503,),
        ambiguity=Ambiguity.MISSING_DESTINATION,
    )
    result = validate(scene, intent)
    assert result.verdict is Verdict.PARTIAL_OR_DUPLICATE
    assert set(result.suggestions) == {602, 604, 608}


def test_validate_requires_pick_place(scene):
    with pytest.raises(ContractError):
        validate(scene, ParsedIntent(action=Action.CONFIRM))


def test_precedence_ambiguity_before_not_present(scene):
    intent = ParsedIntent(
        action=Action.PICK_PLACE,
        target_refs=(501, 999),
        destination_refs=(602,),
        ambiguity=Ambiguity.CONFLICTING_TARGETS,
        unknown_refs=(999,),
    )
    assert validate(scene, intent).verdict is Verdict.PARTIAL_OR_DUPLICATE


def test_precedence_not_present_before_history(scene):
    occupied = apply_install(scene, 503, 608)
    intent = ParsedIntent(
        action=Action.PICK_PLACE,
        target_refs=(999,),
        destination_refs=(608,),
        unknown_refs=(999,),
    )
    assert validate(occupied, intent).verdict is Verdict.MATERIAL_NOT_PRESENT


def test_precedence_history_before_pairing(scene):
    installed = apply_install(scene, 504, 606)
    # 504 on 602 is both already-installed and a size mismatch
    assert validate_pair(installed, 504, 602).verdict is Verdict.ALREADY_INSTALLED


def test_suggestions_never_include_used_objects(scene):
    state = apply_install(apply_install(scene, 501, 602), 504, 606)
    result = validate_pair(state, 501, 604)
    assert result.verdict is Verdict.ALREADY_INSTALLED
    assert 501 not in result.suggestions
    assert 602 not in result.suggestions and 606 not in result.suggestions


# ---------------------------------------------------------------------------
# Exhaustive equivalence with the independent oracle
# ---------------------------------------------------------------------------

def test_fresh_scene_verdict_counts(scene):
    table = enumerate_verdicts(scene)
    assert len(table) == 36
    ok_pairs = {pair for pair, verdict in table.items() if verdict is Verdict.OK}
    assert len(ok_pairs) == 10
    expected_ok = {(p, s) for p in (501, 502, 503) for s in (602, 604, 608)} | {(504, 606)}
    assert ok_pairs == expected_ok
    non_ok = [verdict for verdict in table.values() if verdict is not Verdict.OK]
    assert len(non_ok) == 26
    assert all(v is Verdict.MISMATCHED_PAIRING for v in non_ok)


def test_validator_matches_oracle_on_every_reachable_scene(scene):
    scenes = reachable_scenes(scene)
    # 4x8 partial matchings (34) x whether 504 is installed (2)
    assert len(scenes) == 68
    checked = 0
    for state in scenes:
        table = enumerate_verdicts(state)
        for (panel_id, stud_id), verdict in table.items():
            assert verdict is oracle_verdict(state, panel_id, stud_id), (
                panel_id,
                stud_id,
                install_key(state),
            )
            checked += 1
    assert checked == 68 * 36


def test_exactly_six_complete_assignments(scene):
    complete = [
        s for s in reachable_scenes(scene) if not available(s, ObjectKind.PANEL)
    ]
    assert len(complete) == 6
    for state in complete:
        installs = dict(install_key(state))
        assert installs[504] == 606
        assert sorted(installs[p] for p in (501, 502, 503)) == [602, 604, 608]


def test_all_installed_leaves_no_ok_pairs(scene):
    state = scene
    for panel_id, stud_id in ((501, 602), (502, 604), (503, 608), (504, 606)):
        state = apply_install(state, panel_id, stud_id)
    table = enumerate_verdicts(state)
    assert all(verdict is not Verdict.OK for verdict in table.values())


def test_verdict_table_csv(scene):
    csv_text = verdict_table_csv(scene)
    lines = csv_text.strip().splitlines()
    assert lines[0] == "panel,stud,verdict"
    assert len(lines) == 37
    assert "504,606,ok" in lines
    assert "504,605,mismatched_pairing" in lines
