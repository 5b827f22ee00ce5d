import hashlib
import json
from pathlib import Path

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from scenedeck.cli import main as cli_main
from scenedeck.service import build_snapshot, create_app
from scenedeck.synth import SynthSpec, generate_synthetic

try:
    import jsonschema
except ImportError:  # pragma: no cover
    jsonschema = None

SCHEMA_DIR = Path(__file__).resolve().parents[1] / "src/scenedeck/schemas"

SAMPLE_SCRIPT = "DAVE\nHot out here.\n\nSAM\nToo hot.\n\nDAVE\nLet's move.\n"


@pytest.fixture(scope="module")
def service_dir(tmp_path_factory):
    path = tmp_path_factory.mktemp("service")
    generate_synthetic(SynthSpec(seed=23, n_movies=2, scenes_per_movie=4,
                                 shots_per_scene=2, frames_per_shot=2,
                                 casts_per_scene=3, location_vocab_size=90,
                                 embedding_dim=32), path)
    return path


@pytest.fixture(scope="module")
def snapshot(service_dir):
    return build_snapshot(service_dir)


@pytest.fixture(scope="module")
def client(snapshot):
    return TestClient(create_app(snapshot))


def _validate(instance, schema_name):
    if jsonschema is None:
        pytest.skip("jsonschema not installed")
    schema = json.loads((SCHEMA_DIR / schema_name).read_text())
    jsonschema.validate(instance=instance, schema=schema)


def test_visualize_contract(client):
    response = client.post("/api/v1/visualize",
                           json={"script": SAMPLE_SCRIPT, "query": "",
                                 "max_results": 3})
    assert response.status_code == 200
    body = response.json()
    _validate(body, "visualize_response.schema.json")
    assert len(body["results"]) == 3
    for row in body["results"]:
        assert len(row["lines"]) == 3
        assert row["establishing"]["image_url"].startswith("/api/v1/frames/")
        assert set(row["assignment"]) == {"DAVE", "SAM"}


def test_visualize_unknown_attribute(client):
    response = client.post("/api/v1/visualize",
                           json={"script": SAMPLE_SCRIPT,
                                 "query": "select Plaze=Bedroom"})
    assert response.status_code == 400
    body = response.json()
    _validate(body, "error.schema.json")
    assert body["error_kind"] == "UnknownAttribute"
    assert "Plaze" in body["detail"]


def test_visualize_parse_error_position(client):
    query = "select Place=Bedroom, Time-of-day=noon"
    response = client.post("/api/v1/visualize",
                           json={"script": SAMPLE_SCRIPT, "query": query})
    assert response.status_code == 400
    body = response.json()
    _validate(body, "error.schema.json")
    assert body["error_kind"] == "ParseError"
    assert body["position"] == query.index("noon")


def test_visualize_script_parse_error(client):
    response = client.post("/api/v1/visualize", json={"script": "", "query": ""})
    assert response.status_code == 400
    body = response.json()
    assert body["error_kind"] == "ParseError"


def test_visualize_conflicting_constraint(client):
    response = client.post("/api/v1/visualize",
                           json={"script": SAMPLE_SCRIPT,
                                 "query": "select Character1Age>40 and Character1Age<30"})
    assert response.status_code == 400
    assert response.json()["error_kind"] == "ConflictingConstraint"


def test_visualize_empty_results_warns(client):
    response = client.post("/api/v1/visualize",
                           json={"script": SAMPLE_SCRIPT,
                                 "query": "select MovieYear>3000"})
    assert response.status_code == 200
    body = response.json()
    _validate(body, "visualize_response.schema.json")
    assert body["results"] == []
    assert body["warnings"]


def test_visualize_idempotent(client):
    payload = {"script": SAMPLE_SCRIPT, "query": "select Time-of-day=Variable",
               "max_results": 8}
    digests = set()
    for _ in range(3):
        response = client.post("/api/v1/visualize", json=payload)
        digests.add(hashlib.sha256(response.content).hexdigest())
    assert len(digests) == 1


def test_alternatives_endpoint(client, snapshot):
    scene_id = next(iter(snapshot.catalog.scenes))
    scene = snapshot.catalog.scenes[scene_id]
    cast_id = scene.casts[0].cast_id
    response = client.get(f"/api/v1/scenes/{scene_id}/alternatives",
                          params={"cast_id": cast_id})
    assert response.status_code == 200
    body = response.json()
    expected = list(snapshot.annotations[scene_id].recognizable_frames[cast_id])
    assert body["frame_ids"] == expected
    ordinals = [snapshot.catalog.frames[fid].ordinal for fid in body["frame_ids"]]
    assert ordinals == sorted(ordinals)
    assert len(body["image_urls"]) == len(expected)


def test_alternatives_not_found(client, snapshot):
    response = client.get("/api/v1/scenes/nope/alternatives",
                          params={"cast_id": "c00"})
    assert response.status_code == 404
    scene_id = next(iter(snapshot.catalog.scenes))
    response = client.get(f"/api/v1/scenes/{scene_id}/alternatives",
                          params={"cast_id": "zz"})
    assert response.status_code == 404
    _validate(response.json(), "error.schema.json")


def test_frame_image_bytes(client, snapshot, service_dir):
    frame = next(iter(snapshot.catalog.frames.values()))
    response = client.get(f"/api/v1/frames/{frame.frame_id}/image")
    assert response.status_code == 200
    assert response.headers["content-type"] == "image/png"
    assert response.content == (service_dir / frame.image_path).read_bytes()


def test_frame_image_not_found(client):
    assert client.get("/api/v1/frames/nope/image").status_code == 404


def test_locations_endpoint(client):
    body = client.get("/api/v1/locations").json()
    assert len(body["vocabulary"]) == 90


def test_health(client, snapshot):
    body = client.get("/api/v1/health").json()
    assert body["status"] == "ok"
    assert body["scenes"] == len(snapshot.catalog.scenes)
    assert body["frames"] == len(snapshot.catalog.frames)
    assert body["embedding_dim"] == snapshot.store.dim


def test_health_before_load():
    client = TestClient(create_app(None))
    assert client.get("/api/v1/health").status_code == 503


def test_root_placeholder(client):
    response = client.get("/")
    assert response.status_code == 200


def test_static_ui_mount(snapshot, tmp_path):
    (tmp_path / "index.html").write_text("<!doctype html><p>ui</p>")
    client = TestClient(create_app(snapshot, ui_dir=tmp_path))
    response = client.get("/")
    assert "ui" in response.text
    assert client.get("/api/v1/health").status_code == 200


def test_annotation_cache_reused(service_dir, snapshot):
    cache = service_dir / "catalog/annotations.jsonl"
    assert cache.exists()
    before = cache.read_bytes()
    second = build_snapshot(service_dir)
    assert cache.read_bytes() == before
    assert second.annotations == snapshot.annotations


def test_cli_synth_query_roundtrip(tmp_path):
    runner = CliRunner()
    data_dir = tmp_path / "data"
    result = runner.invoke(cli_main, ["synth", "--out", str(data_dir), "--seed", "3",
                                      "--locations", "12", "--dim", "16"])
    assert result.exit_code == 0, result.output

    script_path = tmp_path / "scene.txt"
    script_path.write_text(SAMPLE_SCRIPT)
    out_path = tmp_path / "result.json"
    result = runner.invoke(cli_main, ["query", "--data-dir", str(data_dir),
                                      "--script", str(script_path),
                                      "--attrs", "select Time-of-day=Variable",
                                      "--max-results", "4",
                                      "--out", str(out_path)])
    assert result.exit_code == 0, result.output
    body = json.loads(out_path.read_text())
    _validate(body, "visualize_response.schema.json")
    assert len(body["results"]) == 4


def test_cli_query_bad_attrs_exit_2(tmp_path):
    runner = CliRunner()
    data_dir = tmp_path / "data"
    runner.invoke(cli_main, ["synth", "--out", str(data_dir), "--seed", "3",
                             "--locations", "8", "--dim", "16"])
    script_path = tmp_path / "scene.txt"
    script_path.write_text(SAMPLE_SCRIPT)
    result = runner.invoke(cli_main, ["query", "--data-dir", str(data_dir),
                                      "--script", str(script_path),
                                      "--attrs", "select Place=",
                                      "--out", str(tmp_path / "x.json")])
    assert result.exit_code == 2
    assert "at" in result.output or "position" in result.output


def test_cli_ingest_and_annotate(tmp_path):
    runner = CliRunner()
    data_dir = tmp_path / "data"
    runner.invoke(cli_main, ["synth", "--out", str(data_dir), "--seed", "5",
                             "--locations", "8", "--dim", "16"])
    result = runner.invoke(cli_main, ["ingest", "--data-dir", str(data_dir)])
    assert result.exit_code == 0
    assert "ok:" in result.output

    result = runner.invoke(cli_main, ["annotate", "--data-dir", str(data_dir)])
    assert result.exit_code == 0
    cache = data_dir / "catalog/annotations.jsonl"
    assert cache.exists()
    first = cache.read_bytes()

    result = runner.invoke(cli_main, ["annotate", "--data-dir", str(data_dir),
                                      "--no-cache"])
    assert result.exit_code == 0
    assert cache.read_bytes() == first


def test_movienet_conversion_smoke(tmp_path):
    from scenedeck.catalog import load_catalog
    from scenedeck.movienet import convert_movienet

    meta = tmp_path / "src/meta"
    meta.mkdir(parents=True)
    doc = {
        "mid": "tt0000001", "title": "Sample", "year": 1994, "genres": ["drama"],
        "cast": [{"id": "nm1", "name": "Ada", "gender": "female", "age": 41},
                 {"id": "nm2", "name": "Ben", "gender": "male", "age": 37}],
        "scenes": [{
            "place": "bedroom",
            "cast_ids": ["nm1", "nm2"],
            "shots": [{
                "keyframe": 0,
                "frames": [{
                    "img": "a/0001.jpg", "time_of_day": "day",
                    "width": 1920, "height": 800,
                    "persons": [{"id": "nm1", "bbox": [10, 10, 700, 700],
                                 "face_bbox": [200, 60, 180, 200], "front": True}],
                }],
            }],
        }],
    }
    (meta / "tt0000001.json").write_text(json.dumps(doc))
    out = tmp_path / "out"
    catalog = convert_movienet(tmp_path / "src", out)
    assert catalog.counts() == (1, 1, 1, 1)
    loaded = load_catalog(out)
    assert loaded.scenes["tt0000001s0000"].location_tag == "bedroom"
