"""Chat-completion transport with on-disk request recording and replay.

The API key comes from the FRONTIER_SCOUT_API_KEY environment variable
and nowhere else. Replay mode never touches the network (and needs no
key): responses are served from files keyed by the request-body hash.
"""

import base64
import hashlib
import json
import logging
import os
import struct
import urllib.error
import urllib.request
import zlib

logger = logging.getLogger(__name__)

API_KEY_ENV = "FRONTIER_SCOUT_API_KEY"


class TransportError(RuntimeError):
    """Request could not produce a response body (network, HTTP, replay miss)."""


def canonical_body(body) -> str:
    return json.dumps(body, sort_keys=True, separators=(",", ":"))


def request_key(body, sample_index) -> str:
    """Store key for one request; the sample ordinal keeps the n otherwise
    identical per-step requests from colliding."""
    payload = canonical_body({"request": body, "sample_index": sample_index})
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _png_chunk(tag, data):
    chunk = tag + data
    return (struct.pack(">I", len(data)) + chunk
            + struct.pack(">I", zlib.crc32(chunk) & 0xFFFFFFFF))


def ppm_to_png(ppm: bytes) -> bytes:
    """Convert render_image's P6 output to PNG for data-URL attachment.

    Only handles the exact header layout render_image writes
    (P6\\n<w> <h>\\n255\\n followed by raw RGB).
    """
    if not ppm.startswith(b"P6\n"):
        raise ValueError("not a P6 pixmap")
    header, dims, maxval, raw = ppm.split(b"\n", 3)
    if maxval != b"255":
        raise ValueError("unsupported maxval")
    width, height = (int(t) for t in dims.split())
    stride = width * 3
    if len(raw) != stride * height:
        raise ValueError("truncated pixmap payload")
    scanlines = b"".join(
        b"\x00" + raw[y * stride:(y + 1) * stride] for y in range(height))
    ihdr = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    return (b"\x89PNG\r\n\x1a\n"
            + _png_chunk(b"IHDR", ihdr)
            + _png_chunk(b"IDAT", zlib.compress(scanlines, 9))
            + _png_chunk(b"IEND", b""))


def build_chat_body(config, developer_text, user_text, image_png=None):
    """OpenAI-style chat.completions request body (dict, not yet encoded)."""
    if image_png is None:
        user_content = user_text
    else:
        data_url = "data:image/png;base64," + base64.b64encode(image_png).decode("ascii")
        user_content = [
            {"type": "text", "text": user_text},
            {"type": "image_url", "image_url": {"url": data_url}},
        ]
    body = {
        "model": config.model_name,
        "messages": [
            {"role": "developer", "content": developer_text},
            {"role": "user", "content": user_content},
        ],
    }
    if config.temperature is not None:
        body["temperature"] = config.temperature
    return body


def extract_text(response) -> str:
    try:
        return response["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError) as exc:
        raise TransportError(f"malformed chat response: {exc}") from exc


def _http_post_json(url, body, timeout):
    api_key = os.environ.get(API_KEY_ENV, "")
    if not api_key:
        raise TransportError(f"{API_KEY_ENV} is not set")
    request = urllib.request.Request(
        url,
        data=json.dumps(body).encode("utf-8"),
        headers={
            "Content-Type": "application/json",
            "Authorization": f"Bearer {api_key}",
        },
        method="POST",
    )
    try:
        with urllib.request.urlopen(request, timeout=timeout) as resp:
            return json.loads(resp.read().decode("utf-8"))
    except (urllib.error.URLError, TimeoutError, ValueError) as exc:
        raise TransportError(f"chat request failed: {exc}") from exc


def record_response(record_dir, body, sample_index, response) -> str:
    os.makedirs(record_dir, exist_ok=True)
    key = request_key(body, sample_index)
    path = os.path.join(record_dir, key + ".json")
    entry = {"sample_index": sample_index, "request": body, "response": response}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(entry, fh, indent=1, sort_keys=True)
    return path


def load_response(replay_dir, body, sample_index):
    key = request_key(body, sample_index)
    path = os.path.join(replay_dir, key + ".json")
    if not os.path.exists(path):
        raise TransportError(f"replay store has no entry {key[:16]}... "
                             f"(sample {sample_index})")
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)["response"]


def request_chat(config, body, sample_index) -> str:
    """One request/response round trip, honoring replay/record settings."""
    if config.replay_dir is not None:
        response = load_response(config.replay_dir, body, sample_index)
        return extract_text(response)
    response = _http_post_json(config.endpoint_url, body, config.timeout)
    if config.record_dir is not None:
        path = record_response(config.record_dir, body, sample_index, response)
        logger.debug("recorded scorer exchange at %s", path)
    return extract_text(response)
