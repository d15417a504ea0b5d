from odg.semrep import ingest_semrep_output

RELATION = "SE|101|ab|1|relation|C0024117|Subject Name|dsyn|verb|ISA||C0024109|Object Name|dsyn"
NEGATED = "SE|101|ab|1|relation|C0024117|Subject Name|dsyn|verb|NEG_ISA||C0024109|Object Name|dsyn"
FLAGGED = "SE|101|ab|1|relation|C0024117|Subject Name|dsyn|verb|ISA|negation|C0024109|Object Name|dsyn"
ENTITY = "SE|101|ti|0|entity|C0024117|Some Name|dsyn|matched text|10|22"


def test_relation_line_parses_to_predication():
    result = ingest_semrep_output([RELATION], {"101"})
    assert len(result.predications) == 1
    p = result.predications[0]
    assert (p.subject_cui, p.predicate, p.object_cui) == ("C0024117", "ISA", "C0024109")
    assert p.negated is False
    assert p.pmid == "101"
    assert p.sentence_index == 1


def test_neg_prefix_sets_negated():
    result = ingest_semrep_output([NEGATED], {"101"})
    assert result.predications[0].negated is True
    assert result.predications[0].predicate == "ISA"


def test_negation_column_sets_negated():
    result = ingest_semrep_output([FLAGGED], {"101"})
    assert result.predications[0].negated is True


def test_entity_line_parses_to_mention():
    result = ingest_semrep_output([ENTITY], {"101"})
    assert len(result.mentions) == 1
    m = result.mentions[0]
    assert (m.cui, m.pmid, m.sentence_index, m.start, m.end) == ("C0024117", "101", 0, 10, 22)
    assert m.matched_text == "matched text"


def test_allowlist_drop_is_tallied():
    off_list = RELATION.replace("|101|", "|999|")
    result = ingest_semrep_output([off_list], {"101"})
    assert result.predications == []
    assert result.dropped_by_allowlist == 1


def test_malformed_lines_counted_not_fatal():
    result = ingest_semrep_output(["garbage", RELATION, "a|b"], {"101"})
    assert result.malformed == 2
    assert len(result.predications) == 1


def test_unknown_predicate_is_malformed():
    bad = RELATION.replace("|ISA|", "|NOT_A_RELATION|")
    result = ingest_semrep_output([bad], {"101"})
    assert result.malformed == 1
    assert result.predications == []


def test_reflexive_triple_is_malformed():
    bad = RELATION.replace("C0024109", "C0024117")
    result = ingest_semrep_output([bad], {"101"})
    assert result.malformed == 1


def test_drop_tally_plus_parsed_equals_well_formed_lines():
    lines = [RELATION, ENTITY, RELATION.replace("|101|", "|999|"), "junk"]
    result = ingest_semrep_output(lines, {"101"})
    well_formed = len(lines) - result.malformed
    assert result.parsed + result.dropped_by_allowlist == well_formed


def test_fixture_file(fixtures_dir):
    with open(fixtures_dir / "semrep_output.txt") as fh:
        result = ingest_semrep_output(fh, {"101", "102", "103"})
    assert len(result.mentions) == 1
    assert len(result.predications) == 2
    assert result.dropped_by_allowlist == 1
    assert result.malformed == 1
    negs = {p.predicate: p.negated for p in result.predications}
    assert negs == {"AFFECTS": False, "TREATS": True}
