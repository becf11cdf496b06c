import json

import httpx
import pytest

from twedge.client import ServiceClient, ServiceError


class _StubTransport(httpx.BaseTransport):
    """Canned responses for exercising the remote-client code path."""

    def handle_request(self, request):
        if request.url.path == "/boom":
            return httpx.Response(400, json={"detail": "bad input"})
        if request.url.path == "/garbled":
            return httpx.Response(500, text="not json")
        body = {"path": request.url.path, "method": request.method}
        if request.method == "POST":
            body["payload"] = json.loads(request.content)
        return httpx.Response(200, json=body)


@pytest.fixture()
def remote_client(monkeypatch):
    real_client = httpx.Client
    monkeypatch.setattr(
        httpx,
        "Client",
        lambda base_url, timeout: real_client(
            base_url=base_url, timeout=timeout, transport=_StubTransport()
        ),
    )
    with ServiceClient(base_url="http://example.test") as client:
        yield client


class TestRemotePath:
    def test_get(self, remote_client):
        assert remote_client.get("/health")["path"] == "/health"

    def test_post_payload_forwarded(self, remote_client):
        body = remote_client.post("/solve", {"n": 5})
        assert body["payload"] == {"n": 5}
        assert body["method"] == "POST"

    def test_error_detail_surfaced(self, remote_client):
        with pytest.raises(ServiceError) as err:
            remote_client.post("/boom", {})
        assert err.value.status_code == 400
        assert err.value.detail == "bad input"

    def test_non_json_error_body(self, remote_client):
        with pytest.raises(ServiceError) as err:
            remote_client.get("/garbled")
        assert err.value.status_code == 500
        assert "not json" in err.value.detail


class TestInProcessPath:
    def test_default_client_hits_service(self):
        with ServiceClient() as client:
            assert client.get("/health")["status"] == "ok"

    def test_error_mapping(self):
        with ServiceClient() as client:
            with pytest.raises(ServiceError) as err:
                client.post("/tw/quantile", {"prob": 1e-9})
            assert err.value.status_code == 400
