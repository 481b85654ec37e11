import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from trialforge.clients import (
    MODES,
    SERVICES,
    ReplayStore,
    ServiceClient,
    annotator_callable,
    canonical_request,
    llm_callable,
    pubmed_search_callable,
    request_hash,
    rxnorm_callable,
)
from trialforge.config import ForgeConfig, load_config, parse_config_text
from trialforge.errors import (
    ClientUnavailable,
    ForeignKeyViolation,
    LiveCallForbidden,
    ReplayMiss,
)
from trialforge.store import (
    TABLE_COLUMNS,
    TABLE_ORDER,
    escape_cell,
    read_database,
    study_row,
    unescape_cell,
    verify_manifest,
    write_database,
)
from trialforge.schema import CanonicalStudy, Source


class TestRequestHashing:
    def test_key_order_irrelevant(self):
        assert request_hash({"a": 1, "b": 2}) == request_hash({"b": 2, "a": 1})

    def test_distinct_requests_distinct_hashes(self):
        assert request_hash({"q": "x"}) != request_hash({"q": "y"})

    def test_canonical_form_is_tight(self):
        assert canonical_request({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'


def recording_transport(log):
    def transport(service, request):
        log.append((service, request))
        return {"echo": request, "n": len(log)}

    return transport


class TestServiceClient:
    def test_record_then_replay(self, tmp_path):
        log = []
        store = ReplayStore(tmp_path)
        client = ServiceClient("record", store, recording_transport(log))
        first = client.call("llm", {"prompt": "hi"})
        second = client.call("llm", {"prompt": "hi"})
        assert first == second
        assert client.live_calls == 1
        assert len(store.entries("llm")) == 1

        replayer = ServiceClient("replay", store)
        assert replayer.call("llm", {"prompt": "hi"}) == first
        assert replayer.live_calls == 0

    def test_replay_miss_names_hash(self, tmp_path):
        client = ServiceClient("replay", ReplayStore(tmp_path))
        request = {"prompt": "never recorded"}
        with pytest.raises(ReplayMiss) as excinfo:
            client.call("llm", request)
        assert request_hash(request) in str(excinfo.value)

    def test_offline_miss_is_live_call_forbidden(self, tmp_path):
        client = ServiceClient("offline", ReplayStore(tmp_path))
        with pytest.raises(LiveCallForbidden) as excinfo:
            client.call("rxnorm", {"op": "rxcui", "name": "aspirin"})
        assert "rxnorm" in str(excinfo.value)

    def test_offline_serves_recorded(self, tmp_path):
        store = ReplayStore(tmp_path)
        digest = request_hash({"q": "a"})
        store.put("pubmed_search", digest, {"q": "a"}, {"ids": [1, 2]})
        client = ServiceClient("offline", store)
        assert client.call("pubmed_search", {"q": "a"}) == {"ids": [1, 2]}

    def test_unknown_service_and_mode(self, tmp_path):
        store = ReplayStore(tmp_path)
        with pytest.raises(ValueError):
            ServiceClient("live", store)
        client = ServiceClient("replay", store)
        with pytest.raises(ValueError):
            client.call("geocoder", {})

    def test_record_requires_transport(self, tmp_path):
        client = ServiceClient("record", ReplayStore(tmp_path))
        with pytest.raises(ValueError):
            client.call("llm", {"prompt": "x"})

    def test_transport_oserror_wrapped(self, tmp_path):
        def broken(service, request):
            raise ConnectionError("refused")

        client = ServiceClient("record", ReplayStore(tmp_path), broken)
        with pytest.raises(ClientUnavailable):
            client.call("llm", {"prompt": "x"})

    def test_store_file_keeps_request_for_debugging(self, tmp_path):
        store = ReplayStore(tmp_path)
        client = ServiceClient("record", store, recording_transport([]))
        client.call("annotator", {"text": "diabetes"})
        digest = request_hash({"text": "diabetes"})
        payload = json.loads((tmp_path / "annotator" / f"{digest}.json").read_text())
        assert payload["request"] == {"text": "diabetes"}
        assert payload["service"] == "annotator"

    def test_adapters(self, tmp_path):
        store = ReplayStore(tmp_path)
        store.put("llm", request_hash({"prompt": "p"}), {"prompt": "p"}, {"text": "out"})
        store.put("rxnorm", request_hash({"op": "rxcui"}), {"op": "rxcui"}, {"rxcui": "1"})
        store.put("annotator", request_hash({"text": "t"}), {"text": "t"}, {"annotations": []})
        store.put(
            "pubmed_search",
            request_hash({"query": "amd", "k": 500}),
            {"query": "amd", "k": 500},
            {"ids": ["111", "222"]},
        )
        client = ServiceClient("replay", store)
        assert llm_callable(client)("p") == "out"
        assert rxnorm_callable(client)({"op": "rxcui"}) == {"rxcui": "1"}
        assert annotator_callable(client)({"text": "t"}) == {"annotations": []}
        assert pubmed_search_callable(client)("amd") == ["111", "222"]

    def test_constants(self):
        assert SERVICES == ("rxnorm", "annotator", "pubmed_search", "llm")
        assert MODES == ("record", "replay", "offline")


class TestConfig:
    def test_parse_and_types(self):
        text = "\n".join(
            [
                "# pipeline knobs",
                "seed = 7",
                'out_dir = "/tmp/out"',
                "dedupe_threshold = 0.95",
                "allow_small_split = yes",
                "",
                "mode=replay",
            ]
        )
        config = ForgeConfig(parse_config_text(text))
        assert config.get_int("seed", 0) == 7
        assert str(config.get_path("out_dir")) == "/tmp/out"
        assert config.get_float("dedupe_threshold", 0.0) == 0.95
        assert config.get_bool("allow_small_split", False) is True
        assert config.get("mode") == "replay"
        assert config.get("absent", "fallback") == "fallback"

    def test_bad_lines(self):
        with pytest.raises(ValueError):
            parse_config_text("just words")
        with pytest.raises(ValueError):
            parse_config_text("= value")

    def test_bad_bool(self):
        config = ForgeConfig({"flag": "maybe"})
        with pytest.raises(ValueError):
            config.get_bool("flag", False)

    def test_env_override_wins(self, tmp_path):
        path = tmp_path / "forge.cfg"
        path.write_text("seed = 7\nmode = replay\n")
        config = load_config(path, env={"FORGE_SEED": "99", "HOME": "/root"})
        assert config.get_int("seed", 0) == 99
        assert config.get("mode") == "replay"

    def test_env_only(self):
        config = load_config(env={"FORGE_VOCAB_DIR": "/data/vocab"})
        assert str(config.get_path("vocab_dir")) == "/data/vocab"


def minimal_bundle():
    study = study_row(CanonicalStudy(study_id="NCT1", source=Source.CTGOV, title="T"))
    return {
        "studies": [study],
        "conditions": [
            {"study_id": "NCT1", "mesh_id": "D003924", "mesh_term": "Diabetes", "mesh_type": "mesh-list"}
        ],
    }


class TestEscaping:
    @given(st.text(max_size=200))
    def test_roundtrip(self, text):
        assert unescape_cell(escape_cell(text)) == text

    def test_tab_newline_visible(self):
        assert escape_cell("a\tb\nc\\d\re") == "a\\tb\\nc\\\\d\\re"


class TestWriteDatabase:
    def test_empty_input_header_only(self, tmp_path):
        bundle = write_database({}, tmp_path / "db")
        assert set(bundle.counts.values()) == {0}
        for name in TABLE_ORDER:
            lines = (tmp_path / "db" / f"{name}.tsv").read_text().splitlines()
            assert lines == ["\t".join(TABLE_COLUMNS[name])]
        manifest = (tmp_path / "db" / "manifest.tsv").read_text().splitlines()
        assert manifest[0] == "table\trows\tsha256"
        assert len(manifest) == 1 + len(TABLE_ORDER) + 1  # header + tables + bundle line

    def test_roundtrip_with_hostile_cells(self, tmp_path):
        tables = minimal_bundle()
        tables["studies"][0]["brief_summary"] = "line one\nline two\twith tab\\and slash"
        write_database(tables, tmp_path / "db")
        back = read_database(tmp_path / "db")
        assert back["studies"] == tables["studies"]
        assert back["conditions"] == tables["conditions"]

    def test_random_roundtrip(self, tmp_path):
        rng = random.Random(13)
        alphabet = "ab\t\n\\\"'x "
        studies = []
        for index in range(20):
            row = study_row(CanonicalStudy(study_id=f"S{index:03d}", source=Source.ISRCTN, title="t"))
            row["title"] = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 12)))
            studies.append(row)
        write_database({"studies": studies}, tmp_path / "db")
        back = read_database(tmp_path / "db")
        assert back["studies"] == sorted(studies, key=lambda r: r["study_id"])

    def test_two_runs_byte_identical(self, tmp_path):
        tables = minimal_bundle()
        write_database(tables, tmp_path / "one")
        write_database(tables, tmp_path / "two")
        for name in list(TABLE_ORDER) + ["manifest"]:
            first = (tmp_path / "one" / f"{name}.tsv").read_bytes()
            second = (tmp_path / "two" / f"{name}.tsv").read_bytes()
            assert first == second, name

    def test_rows_sorted_by_key(self, tmp_path):
        rows = [
            study_row(CanonicalStudy(study_id=sid, source=Source.CTGOV, title="t"))
            for sid in ["NCT3", "NCT1", "NCT2"]
        ]
        write_database({"studies": rows}, tmp_path / "db")
        back = read_database(tmp_path / "db")
        assert [row["study_id"] for row in back["studies"]] == ["NCT1", "NCT2", "NCT3"]

    def test_foreign_key_violation_writes_nothing(self, tmp_path):
        tables = minimal_bundle()
        tables["conditions"][0]["study_id"] = "NCT-GHOST"
        out = tmp_path / "db"
        with pytest.raises(ForeignKeyViolation) as excinfo:
            write_database(tables, out)
        assert "NCT-GHOST" in str(excinfo.value)
        assert not out.exists()

    def test_duplicate_key_rejected(self, tmp_path):
        row = study_row(CanonicalStudy(study_id="NCT1", source=Source.CTGOV, title="t"))
        with pytest.raises(ValueError):
            write_database({"studies": [row, dict(row)]}, tmp_path / "db")

    def test_bad_shape_and_type(self, tmp_path):
        with pytest.raises(ValueError):
            write_database({"conditions": [{"study_id": "NCT1"}]}, tmp_path / "db")
        tables = minimal_bundle()
        tables["conditions"][0]["mesh_id"] = 42
        with pytest.raises(TypeError):
            write_database(tables, tmp_path / "db")
        with pytest.raises(ValueError):
            write_database({"not_a_table": []}, tmp_path / "db")

    def test_verify_manifest(self, tmp_path):
        write_database(minimal_bundle(), tmp_path / "db")
        assert verify_manifest(tmp_path / "db") == []
        path = tmp_path / "db" / "conditions.tsv"
        path.write_text(path.read_text() + "NCT1\tD0\tx\tmesh-list\n")
        problems = verify_manifest(tmp_path / "db")
        assert any("conditions" in p for p in problems)

    def test_verify_missing_manifest(self, tmp_path):
        assert verify_manifest(tmp_path) == ["manifest missing"]
