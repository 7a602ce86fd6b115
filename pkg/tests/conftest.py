import pytest

from mmworkbench.demo import write_demo_clip


@pytest.fixture(scope="session")
def demo_dir(tmp_path_factory):
    """The bundled demo clip, written once per test session."""
    out = tmp_path_factory.mktemp("demo-clip")
    write_demo_clip(out)
    return out


@pytest.fixture()
def client(tmp_path):
    from fastapi.testclient import TestClient

    from mmworkbench.api import create_app
    app = create_app(tmp_path / "data")
    with TestClient(app) as c:
        yield c
