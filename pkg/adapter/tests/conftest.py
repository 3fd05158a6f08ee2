import pytest

from seg_adapter import AdapterConfig, make_sample_clip, run_adapter


@pytest.fixture(scope="session")
def sample_clip(tmp_path_factory):
    path = tmp_path_factory.mktemp("clip") / "sample.avi"
    return make_sample_clip(str(path))


@pytest.fixture(scope="session")
def sample_log(sample_clip, tmp_path_factory):
    out = tmp_path_factory.mktemp("log") / "detections.json"
    run_adapter(AdapterConfig(video=sample_clip), out=str(out))
    return str(out)
