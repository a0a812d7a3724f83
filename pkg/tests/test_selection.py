import pytest

from defquest import corpus, selection
from defquest.corpus import ConceptIndex, Sentence
from defquest.errors import DataError

GOLDEN_T07_IDS = [
    "cell-biology/1/2/0",
    "cell-biology/1/3/0",
    "cell-biology/2/1/1",
    "cell-biology/3/0/0",
    "cell-biology/3/2/0",
    "cell-biology/4/3/1",
]


def sent(text, sid="s0"):
    return Sentence(id=sid, text=text, char_span=(0, len(text)), paragraph_id="p0")


class TestKeywordFilter:
    def test_concept_kept_case_insensitively(self):
        index = ConceptIndex(frozenset({"metabolism"}))
        kept = selection.keyword_filter(
            [sent("Metabolism is the sum of all anabolic and catabolic reactions.")], index
        )
        assert len(kept) == 1

    def test_inflected_form_dropped(self):
        index = ConceptIndex(frozenset({"metabolism"}))
        assert selection.keyword_filter([sent("The metabolisms differ.")], index) == []

    def test_no_overlap_gives_empty(self):
        index = ConceptIndex(frozenset({"mitochondrion"}))
        assert selection.keyword_filter([sent("Nothing relevant here.")], index) == []

    def test_multiword_phrase_matches_across_one_space(self):
        index = ConceptIndex(frozenset({"cell wall"}))
        assert selection.keyword_filter([sent("The cell wall is rigid.")], index)
        assert selection.keyword_filter([sent("The cell  wall is rigid.")], index) == []

    def test_regex_metacharacters_are_literal(self):
        index = ConceptIndex(frozenset({"C++ (language)"}))
        assert selection.keyword_filter([sent("We study C++ (language) here.")], index)
        assert selection.keyword_filter([sent("We study C and language here.")], index) == []

    def test_order_preserved(self, book, index):
        kept = selection.keyword_filter(list(book.sentences()), index)
        ids = [s.id for s in kept]
        assert ids == sorted(ids, key=[s.id for s in book.sentences()].index)
        assert len(kept) == 20


class TestRuleScore:
    def test_strong_cue(self):
        s = selection.rule_score(sent("Temperance is defined as abstinence of alcohol."))
        assert s.score == 0.9

    def test_copula_indefinite(self):
        s = selection.rule_score(
            sent("A variable is any part of the experiment that can vary or change.")
        )
        assert s.score == 0.6

    def test_default(self):
        assert selection.rule_score(sent("The weather was nice.")).score == 0.1

    def test_is_called_is_strong(self):
        assert selection.rule_score(sent("This is called osmosis.")).score == 0.9

    def test_scorer_id(self):
        assert selection.rule_score(sent("x.")).scorer_id == "rule"


class FailingScorer:
    scorer_id = "failing"

    def score_batch(self, sentences):
        return [
            selection.ScoredSentence(sentence_id="wrong-id", score=0.5, scorer_id="failing")
            for _ in sentences
        ]


class TestContextSelect:
    def test_threshold_zero_equals_keyword_filter(self, book, index):
        sentences = list(book.sentences())
        config = selection.SelectionConfig(threshold=0.0)
        got = selection.context_select(sentences, index, selection.RuleScorer(), config)
        assert got == selection.keyword_filter(sentences, index)

    def test_threshold_one_selects_nothing(self, book, index):
        config = selection.SelectionConfig(threshold=1.0)
        got = selection.context_select(
            list(book.sentences()), index, selection.RuleScorer(), config
        )
        assert got == []

    def test_fixture_golden_ids_at_default_threshold(self, book, index):
        config = selection.SelectionConfig()  # 0.7
        got = selection.context_select(
            list(book.sentences()), index, selection.RuleScorer(), config
        )
        assert [s.id for s in got] == GOLDEN_T07_IDS

    def test_misaligned_scorer_fails_with_sentence_id(self, book, index):
        config = selection.SelectionConfig()
        with pytest.raises(DataError, match="misaligned"):
            selection.context_select(
                list(book.sentences()), index, FailingScorer(), config
            )

    def test_threshold_monotonicity(self, book, index):
        sentences = list(book.sentences())
        previous = None
        for threshold in [i / 10 for i in range(11)]:
            got = selection.context_select(
                sentences, index, selection.RuleScorer(),
                selection.SelectionConfig(threshold=threshold),
            )
            ids = {s.id for s in got}
            if previous is not None:
                assert ids <= previous
            previous = ids

    def test_scorer_swap_changes_membership_not_order(self, book, index):
        sentences = list(book.sentences())

        class HalfScorer:
            scorer_id = "half"

            def score_batch(self, batch):
                return [
                    selection.ScoredSentence(sentence_id=s.id, score=0.5, scorer_id="half")
                    for s in batch
                ]

        config = selection.SelectionConfig(threshold=0.4)
        got = selection.context_select(sentences, index, HalfScorer(), config)
        assert got == selection.keyword_filter(sentences, index)

    def test_out_of_range_threshold_rejected(self):
        with pytest.raises(DataError, match="threshold"):
            selection.SelectionConfig(threshold=1.5)


class TestAnswerSelect:
    @pytest.fixture(autouse=True)
    def _patterns(self):
        self.patterns = selection.load_default_patterns()

    def test_variable_sentence_relative_clause(self, graphs_by_id):
        candidate = selection.answer_select(graphs_by_id["cell-biology/4/1/0"], self.patterns)
        assert candidate.pattern_id == "A1"
        assert candidate.text == "that can vary or change during the experiment"
        assert candidate.token_ids == tuple(range(9, 17))

    def test_dsrna_participial_clause(self, graphs_by_id):
        candidate = selection.answer_select(graphs_by_id["cell-biology/5/1/0"], self.patterns)
        assert candidate.pattern_id == "A2"
        assert candidate.text == "called replicative intermediates"

    def test_cell_wall_coordinated_clause(self, graphs_by_id):
        candidate = selection.answer_select(graphs_by_id["cell-biology/1/0/0"], self.patterns)
        assert candidate.pattern_id == "A1"
        assert candidate.text == (
            "that protects the cell , provides structural support , and gives shape to the cell"
        )

    def test_adverbial_clause_on_root(self, graphs_by_id):
        candidate = selection.answer_select(graphs_by_id["cell-biology/4/3/1"], self.patterns)
        assert candidate.pattern_id == "A3"
        assert candidate.text == "when it unifies a broad range of observations"

    def test_most_words_wins(self, graphs_by_id):
        # The enzyme sentence: relcl candidate has 9 tokens, no competitor,
        # but build a two-candidate case from the vacuole + cytoplasm parses.
        from defquest.depgraph import DependencyGraph, Token

        tokens = (
            Token(1, "thing", "thing", "NOUN", "NN", 0, "root"),
            Token(2, "seen", "see", "VERB", "VBN", 1, "acl"),
            Token(3, "today", "today", "NOUN", "NN", 2, "obl"),
            Token(4, "item", "item", "NOUN", "NN", 1, "nmod"),
            Token(5, "made", "make", "VERB", "VBN", 4, "acl"),
            Token(6, "of", "of", "ADP", "IN", 7, "case"),
            Token(7, "iron", "iron", "NOUN", "NN", 5, "obl"),
            Token(8, "ore", "ore", "NOUN", "NN", 7, "compound"),
        )
        graph = DependencyGraph(sentence_id="two-cands", tokens=tokens)
        candidate = selection.answer_select(graph, self.patterns)
        assert candidate.token_ids == (5, 6, 7, 8)  # 4 tokens beat 2

    def test_tie_broken_by_leftmost_start(self):
        from defquest.depgraph import DependencyGraph, Token

        tokens = (
            Token(1, "a", "a", "NOUN", "NN", 0, "root"),
            Token(2, "b", "b", "VERB", "VBN", 1, "acl"),
            Token(3, "c", "c", "NOUN", "NN", 2, "obl"),
            Token(4, "d", "d", "NOUN", "NN", 1, "nmod"),
            Token(5, "e", "e", "VERB", "VBN", 4, "acl"),
            Token(6, "f", "f", "NOUN", "NN", 5, "obl"),
        )
        graph = DependencyGraph(sentence_id="tie", tokens=tokens)
        candidate = selection.answer_select(graph, selection.load_default_patterns())
        assert candidate.token_ids == (2, 3)

    def test_direct_object_fallback(self, graphs_by_id):
        candidate = selection.answer_select(graphs_by_id["cell-biology/2/2/1"], self.patterns)
        assert candidate.pattern_id == "OBJ"
        assert candidate.text == "energy"

    def test_no_clause_no_object_drops(self, graphs_by_id):
        assert selection.answer_select(graphs_by_id["cell-biology/3/1/0"], self.patterns) is None

    def test_conj_chain_fallback(self):
        from defquest.depgraph import DependencyGraph, Token

        tokens = (
            Token(1, "runs", "run", "VERB", "VBZ", 0, "root"),
            Token(2, "and", "and", "CCONJ", "CC", 3, "cc"),
            Token(3, "eats", "eat", "VERB", "VBZ", 1, "conj"),
            Token(4, "apples", "apple", "NOUN", "NNS", 3, "obj"),
        )
        graph = DependencyGraph(sentence_id="conj", tokens=tokens)
        candidate = selection.answer_select(graph, selection.load_default_patterns())
        assert candidate.pattern_id == "OBJ"
        assert candidate.text == "apples"

    def test_candidates_are_subsets_in_surface_order(self, gold_graphs):
        for graph in gold_graphs:
            candidate = selection.answer_select(graph, self.patterns)
            if candidate is None:
                continue
            assert candidate.token_ids
            assert list(candidate.token_ids) == sorted(candidate.token_ids)
            forms = {t.id: t.form for t in graph.tokens}
            assert candidate.text == " ".join(forms[i] for i in candidate.token_ids)


class TestCoverageReport:
    def test_all_empty_graphs_are_no_match(self):
        from defquest.depgraph import DependencyGraph, Token

        graphs = [
            DependencyGraph(
                sentence_id=f"g{i}",
                tokens=(Token(1, "hi", "hi", "INTJ", "UH", 0, "root"),),
            )
            for i in range(5)
        ]
        counts = selection.coverage_report(graphs, selection.load_default_patterns())
        assert counts == {
            "no_match": 5,
            "adjectival": 0,
            "adverbial": 0,
            "direct_object": 0,
        }

    def test_fixture_golden_counts(self, gold_graphs):
        counts = selection.coverage_report(gold_graphs, selection.load_default_patterns())
        assert counts == {
            "no_match": 1,
            "adjectival": 17,
            "adverbial": 1,
            "direct_object": 1,
        }
        assert sum(counts.values()) == len(gold_graphs)


class TestScoreCache:
    def test_round_trip(self, tmp_path):
        import io

        scored = [
            selection.ScoredSentence(sentence_id="a", score=0.5, scorer_id="rule"),
            selection.ScoredSentence(sentence_id="b", score=1.0, scorer_id="rule"),
        ]
        buf = io.StringIO()
        selection.write_score_cache(buf, scored)
        cache = selection.load_score_cache(buf.getvalue())
        assert cache["a"].score == 0.5
        assert cache["b"].scorer_id == "rule"
