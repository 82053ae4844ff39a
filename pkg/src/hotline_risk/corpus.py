"""Seeded synthetic hotline corpus for offline end-to-end runs.

Each caller utterance that discloses a risk factor carries the factor's
lexicon tag, so the mock backend's score is a known function of the case.
Positives carry factors weighing 8 or more in total, negatives 7 or less.
"""

from __future__ import annotations

import random

from hotline_risk.assessment import ManualScaleRecord, ScaleElement
from hotline_risk.domain import (
    CaseRecord,
    FollowUpOutcome,
    OutcomeStatus,
    Speaker,
    TranscriptDocument,
    Utterance,
)
from hotline_risk.llm.lexicon import RiskLexicon
from hotline_risk.llm.redaction import load_term_list

_DISCLOSURES = {
    ScaleElement.SUICIDAL_IDEATION_AND_PLAN: "我最近一直想结束自己的生命，连方法都想好了。",
    ScaleElement.SEVERE_DEPRESSION: "好几个月了我每天都很低落，睡不着也吃不下，什么都提不起兴趣。",
    ScaleElement.HOPELESSNESS: "我觉得以后不会再好起来了，看不到任何希望。",
    ScaleElement.PSYCHOLOGICAL_DISTRESS: "我现在心里特别难受，整个人都快崩溃了。",
    ScaleElement.ACUTE_LIFE_EVENTS: "上个星期我刚失业，女朋友也和我分手了。",
    ScaleElement.CHRONIC_LIFE_EVENTS: "家里这几年一直吵架，经济压力也一直很大。",
    ScaleElement.ALCOHOL_OR_SUBSTANCE_MISUSE: "我每天晚上都要喝很多酒才能睡着。",
    ScaleElement.SEVERE_PHYSICAL_ILLNESS: "我去年查出来得了很严重的病，一直在治疗。",
    ScaleElement.FEAR_OF_BEING_ATTACKED: "我总担心有人要来害我，出门都很害怕。",
    ScaleElement.HISTORY_OF_BEING_ABUSED: "小时候我经常被家里人打骂。",
    ScaleElement.SUICIDE_ATTEMPT_HISTORY: "前年我吃过一次药，被送到医院抢救过来了。",
    ScaleElement.RELATIVES_OR_ACQUAINTANCES_SUICIDAL_ACTS_HISTORY: "我有个亲戚几年前自杀了。",
}

_OPERATOR_LINES = (
    "你好，这里是心理援助热线，我在听。",
    "能和我多说说最近发生了什么吗？",
    "听起来你现在承受了很大的压力。",
    "这种感觉持续多久了？",
    "你身边有可以信任的人吗？",
    "谢谢你愿意告诉我这些。",
    "你最近睡眠和饮食怎么样？",
    "我们可以一起想想接下来可以做些什么。",
)

_CALLER_FILLER = (
    "我也不知道该从哪里说起。",
    "工作上的事情让我很烦。",
    "最近天气变冷了，我一直待在家里。",
    "我和同事的关系还可以。",
    "有时候会出去走走，但是没什么用。",
    "我妈妈总是打电话问我怎么样。",
    "周末我一般就是看看手机。",
    "我也试过跟朋友聊，但说不出口。",
    "就是觉得很累，不想动。",
    "以前我还挺喜欢画画的。",
)


def _pick_factors(rng: random.Random, positive: bool, lexicon: RiskLexicon) -> list[ScaleElement]:
    weight = {e.element: e.weight for e in lexicon.entries}
    others = [e for e in ScaleElement if e is not ScaleElement.SUICIDAL_IDEATION_AND_PLAN]
    rng.shuffle(others)
    if positive:
        target = rng.randint(8, 14)
        chosen = [ScaleElement.SUICIDAL_IDEATION_AND_PLAN]
        total = weight[chosen[0]]
        for element in others:
            if total >= target:
                break
            chosen.append(element)
            total += weight[element]
        return chosen
    target = rng.randint(0, 7)
    pool = list(ScaleElement)
    rng.shuffle(pool)
    chosen, total = [], 0
    for element in pool:
        if total + weight[element] <= target:
            chosen.append(element)
            total += weight[element]
    return chosen


def _scale(rng: random.Random, factors: list[ScaleElement], missing: bool) -> ManualScaleRecord:
    answers: dict[ScaleElement, int | None] = {e: (e.max_score if e in factors else 0) for e in ScaleElement}
    # Operators' ratings disagree with the disclosed factors now and then.
    if rng.random() < 0.35:
        element = rng.choice(list(ScaleElement))
        permitted = sorted(element.permitted - {answers[element]})
        answers[element] = rng.choice(permitted)
    n_blank = rng.randint(6, 9) if missing else rng.choice((0, 0, 0, 1, 2))
    for element in rng.sample(list(ScaleElement), n_blank):
        answers[element] = None
    return ManualScaleRecord(answers={e: v for e, v in answers.items() if v is not None})


def _transcript(
    rng: random.Random, factors: list[ScaleElement], lexicon: RiskLexicon, names: list[str]
) -> TranscriptDocument:
    target_chars = rng.randint(150, 17500)
    disclosures = [f"{_DISCLOSURES[e]}{lexicon.entry_for(e).tag}" for e in factors]
    utterances = [Utterance(Speaker.OPERATOR, _OPERATOR_LINES[0])]
    if names and rng.random() < 0.5:
        phone = "1" + "".join(rng.choice("3456789") for _ in range(2)) + "".join(rng.choice("0123456789") for _ in range(8))
        utterances.append(Utterance(Speaker.CALLER, f"我叫{rng.choice(names)}，电话是{phone}。"))
    length = sum(len(u.text) + 1 for u in utterances)
    body: list[Utterance] = []
    while length < target_chars:
        op = Utterance(Speaker.OPERATOR, rng.choice(_OPERATOR_LINES[1:]))
        caller = Utterance(Speaker.CALLER, "".join(rng.choice(_CALLER_FILLER) for _ in range(rng.randint(1, 8))))
        body.extend((op, caller))
        length += len(op.text) + len(caller.text) + 2
    for text in disclosures:
        pos = rng.randint(0, len(body))
        body.insert(pos, Utterance(Speaker.CALLER, text))
    return TranscriptDocument.from_utterances(utterances + body)


def generate(
    n_cases: int = 50,
    seed: int = 0,
    positive_fraction: float = 0.4,
    missing_scale_fraction: float = 0.2,
    lexicon: RiskLexicon | None = None,
    names: list[str] | None = None,
) -> list[CaseRecord]:
    """Pure function of its arguments: the same inputs give the same corpus."""
    if n_cases < 1:
        raise ValueError("n_cases must be >= 1")
    lexicon = lexicon or RiskLexicon.default()
    names = load_term_list(None, "names.txt") if names is None else names
    rng = random.Random(seed)
    positives = set(rng.sample(range(n_cases), round(n_cases * positive_fraction)))
    missing = set(rng.sample(range(n_cases), round(n_cases * missing_scale_fraction)))
    cases = []
    for i in range(n_cases):
        positive = i in positives
        factors = _pick_factors(rng, positive, lexicon)
        cases.append(
            CaseRecord(
                case_id=f"case-{i:04d}",
                transcript=_transcript(rng, factors, lexicon, names),
                scale=_scale(rng, factors, i in missing),
                outcome=FollowUpOutcome(attempted_suicide=positive, status=OutcomeStatus.CONFIRMED),
                meta={"age": str(rng.randint(12, 43)), "gender": rng.choice(("female", "male"))},
            )
        )
    return cases
