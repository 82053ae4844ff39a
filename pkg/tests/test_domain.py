import pytest

from hotline_risk.assessment import ManualScaleRecord, ScaleElement
from hotline_risk.domain import (
    CaseRecord,
    DuplicateCaseId,
    FollowUpOutcome,
    OutcomeStatus,
    RiskLabel,
    Speaker,
    TranscriptDocument,
    Utterance,
    check_unique_ids,
    validate_case,
)

from conftest import make_doc


def test_valid_case_has_no_findings():
    case = CaseRecord("c1", make_doc(["hello", "hi"]), outcome=FollowUpOutcome(True))
    assert validate_case(case) == []
    assert validate_case(case, for_evaluation=True) == []


def test_empty_transcript_is_reported():
    case = CaseRecord("c1", TranscriptDocument(text=""))
    assert "transcript.text empty" in validate_case(case)


def test_outcome_optional_outside_evaluation():
    case = CaseRecord("c1", make_doc(["only prediction"]))
    assert validate_case(case) == []
    assert validate_case(case, for_evaluation=True) == ["outcome absent"]


def test_utterance_text_mismatch():
    doc = make_doc(["first", "second"])
    broken = TranscriptDocument(text=doc.text + "x", utterances=doc.utterances)
    assert validate_case(CaseRecord("c1", broken)) == ["utterance/text mismatch"]


def test_lost_outcome_not_evaluable():
    case = CaseRecord("c1", make_doc(["x"]), outcome=FollowUpOutcome(False, OutcomeStatus.LOST, 2))
    assert validate_case(case, for_evaluation=True) == ["outcome not confirmed"]


def test_bad_scale_answer_and_schedule_points():
    case = CaseRecord(
        "c1",
        make_doc(["x"]),
        scale=ManualScaleRecord({ScaleElement.ACUTE_LIFE_EVENTS: 1}),
        outcome=FollowUpOutcome(True, schedule_points_reached=5),
    )
    findings = validate_case(case)
    assert len(findings) == 2
    assert findings[0].startswith("scale.acute_life_events=1")


def test_join_roundtrip_uses_newline():
    doc = TranscriptDocument.from_utterances([Utterance(Speaker.OPERATOR, "你好"), Utterance(Speaker.CALLER, "我不好")])
    assert doc.text == "你好\n我不好"
    assert doc.joined() == doc.text


def test_duplicate_ids_rejected():
    cases = [CaseRecord("a", make_doc(["x"])), CaseRecord("a", make_doc(["y"]))]
    with pytest.raises(DuplicateCaseId):
        check_unique_ids(cases)


@pytest.mark.parametrize("score,label", [(0, RiskLabel.LOW_MODERATE), (7, RiskLabel.LOW_MODERATE), (8, RiskLabel.HIGH_RISK), (16, RiskLabel.HIGH_RISK)])
def test_label_threshold(score, label):
    assert RiskLabel.from_score(score) is label
