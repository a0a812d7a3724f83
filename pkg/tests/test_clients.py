import json

import httpx
import pytest

from defquest import clients
from defquest.errors import DataError, ProtocolError, ServiceError

CONLLU_BLOCK = """\
1\tcats\tcat\tNOUN\tNNS\t_\t2\tnsubj:pass\t_\t_
2\tsleep\tsleep\tVERB\tVBP\t_\t0\troot\t_\t_
"""


def endpoint(**kwargs):
    defaults = {"base_url": "http://model.test", "retries": 1, "timeout": 5.0}
    defaults.update(kwargs)
    return clients.ServiceEndpoint(**defaults)


def transport_for(handler):
    return httpx.MockTransport(handler)


class TestRemoteParse:
    def test_single_sentence(self):
        def handler(request):
            assert json.loads(request.content)["sentences"] == ["cats sleep"]
            return httpx.Response(200, text=CONLLU_BLOCK)

        graphs = clients.remote_parse(endpoint(), ["cats sleep"], transport=transport_for(handler))
        assert len(graphs) == 1
        assert graphs[0].root.form == "sleep"

    def test_count_mismatch(self):
        def handler(request):
            return httpx.Response(200, text=CONLLU_BLOCK)

        with pytest.raises(ProtocolError, match="1 graphs for 3"):
            clients.remote_parse(
                endpoint(), ["a", "b", "c"], transport=transport_for(handler)
            )

    def test_label_map_applied(self):
        def handler(request):
            return httpx.Response(200, text=CONLLU_BLOCK)

        graphs = clients.remote_parse(
            endpoint(),
            ["cats sleep"],
            label_map={"nsubj:pass": "nsubjpass"},
            transport=transport_for(handler),
        )
        assert graphs[0].tokens[0].deprel == "nsubjpass"

    def test_malformed_conllu(self):
        def handler(request):
            return httpx.Response(200, text="not conllu at all")

        with pytest.raises(ProtocolError, match="malformed CoNLL-U"):
            clients.remote_parse(endpoint(), ["x"], transport=transport_for(handler))

    def test_http_error(self):
        def handler(request):
            return httpx.Response(404)

        with pytest.raises(ServiceError, match="HTTP 404"):
            clients.remote_parse(endpoint(), ["x"], transport=transport_for(handler))

    def test_empty_batch_rejected(self):
        with pytest.raises(DataError, match="empty batch"):
            clients.remote_parse(endpoint(), [])


class TestRemoteScore:
    def test_scores_returned_in_order(self):
        def handler(request):
            return httpx.Response(200, json={"scores": [0.99, 0.01]})

        scores = clients.remote_score(endpoint(), ["a", "b"], transport=transport_for(handler))
        assert scores == [0.99, 0.01]

    def test_out_of_range_score(self):
        def handler(request):
            return httpx.Response(200, json={"scores": [1.3]})

        with pytest.raises(ProtocolError, match="out-of-range"):
            clients.remote_score(endpoint(), ["a"], transport=transport_for(handler))

    def test_boolean_score_rejected(self):
        def handler(request):
            return httpx.Response(200, json={"scores": [True]})

        with pytest.raises(ProtocolError, match="out-of-range"):
            clients.remote_score(endpoint(), ["a"], transport=transport_for(handler))

    def test_length_mismatch(self):
        def handler(request):
            return httpx.Response(200, json={"scores": [0.5]})

        with pytest.raises(ProtocolError):
            clients.remote_score(endpoint(), ["a", "b"], transport=transport_for(handler))


class TestRemoteGenerate:
    def test_metabolism_example(self):
        def handler(request):
            return httpx.Response(
                200, json={"questions": ["What is metabolism the sum of?"]}
            )

        questions = clients.remote_generate(
            endpoint(),
            ["Metabolism is the sum of all reactions. [SEP] the sum of all reactions"],
            transport=transport_for(handler),
        )
        assert questions == ["What is metabolism the sum of?"]

    def test_length_mismatch(self):
        def handler(request):
            return httpx.Response(200, json={"questions": ["one"]})

        with pytest.raises(ProtocolError):
            clients.remote_generate(endpoint(), ["a", "b"], transport=transport_for(handler))

    def test_empty_question_rejected(self):
        def handler(request):
            return httpx.Response(200, json={"questions": ["  "]})

        with pytest.raises(ProtocolError, match="empty question"):
            clients.remote_generate(endpoint(), ["a"], transport=transport_for(handler))


class TestRetries:
    def test_retry_reuses_request_id_and_never_duplicates(self):
        seen = []

        def handler(request):
            seen.append(request.headers["x-request-id"])
            if len(seen) == 1:
                return httpx.Response(500)
            return httpx.Response(200, json={"scores": [0.5]})

        scores = clients.remote_score(
            endpoint(retries=2), ["a"], transport=transport_for(handler)
        )
        assert scores == [0.5]
        assert len(seen) == 2
        assert len(set(seen)) == 1  # same id on the retry

    def test_client_errors_do_not_retry(self):
        seen = []

        def handler(request):
            seen.append(1)
            return httpx.Response(400)

        with pytest.raises(ServiceError):
            clients.remote_score(endpoint(retries=3), ["a"], transport=transport_for(handler))
        assert len(seen) == 1

    def test_exhausted_retries_raise(self):
        def handler(request):
            return httpx.Response(503)

        with pytest.raises(ServiceError, match="HTTP 503"):
            clients.remote_score(endpoint(retries=1), ["a"], transport=transport_for(handler))


class TestConfig:
    def test_env_overrides(self, monkeypatch):
        monkeypatch.setenv("DEFQUEST_PARSER_URL", "http://env.test")
        config = clients.load_service_config()
        assert config["parser_url"] == "http://env.test"

    def test_bearer_token_header(self):
        def handler(request):
            assert request.headers["authorization"] == "Bearer tok"
            return httpx.Response(200, json={"scores": [0.5]})

        clients.remote_score(
            endpoint(bearer_token="tok"), ["a"], transport=transport_for(handler)
        )

    def test_endpoint_validation(self):
        with pytest.raises(DataError):
            clients.ServiceEndpoint(base_url="http://x", timeout=0)
        with pytest.raises(DataError):
            clients.ServiceEndpoint(base_url="http://x", max_in_flight=0)
