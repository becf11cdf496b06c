"""Thin client for the HTTP service.

The command line talks to the service through this client. By default the
requests run against an in-process instance of the application (no socket,
same request/response semantics); pointing ``base_url`` at a running server
switches to real HTTP without changing anything else.
"""

from __future__ import annotations

from typing import Optional

import httpx


class ServiceError(Exception):
    """Non-2xx response from the service."""

    def __init__(self, status_code: int, detail: str):
        super().__init__(f"service returned {status_code}: {detail}")
        self.status_code = status_code
        self.detail = detail


class ServiceClient:
    def __init__(self, base_url: Optional[str] = None):
        if base_url is None:
            import warnings

            with warnings.catch_warnings():
                # starlette's test client warns about its httpx backend; the
                # in-process transport is exactly what we want here.
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service import create_app

            self._client = TestClient(create_app())
        else:
            self._client = httpx.Client(base_url=base_url, timeout=None)

    def _handle(self, response) -> dict:
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except Exception:
                detail = response.text
            raise ServiceError(response.status_code, str(detail))
        return response.json()

    def get(self, path: str, params: Optional[dict] = None) -> dict:
        return self._handle(self._client.get(path, params=params))

    def post(self, path: str, payload: dict) -> dict:
        return self._handle(self._client.post(path, json=payload))

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "ServiceClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
