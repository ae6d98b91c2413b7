from datetime import datetime, timedelta
from zoneinfo import ZoneInfo

import pytest

from wre.model import (
    ChannelStatus,
    Medium,
    Program,
    ProgramCategory,
    TimeInterval,
)
from wre.synthgen import fixture_lexicon

PARIS = ZoneInfo("Europe/Paris")


def make_program(program_id="p1", channel_id="tv_public_0", medium=Medium.TV,
                 status=ChannelStatus.PUBLIC, category=ProgramCategory.NEWS,
                 start=None, minutes=60, media_id=None, media_start_ms=0):
    if start is None:
        start = datetime(2023, 5, 15, 19, 0, tzinfo=PARIS)
    duration_ms = minutes * 60_000
    return Program(
        program_id=program_id, channel_id=channel_id, medium=medium,
        status=status, category=category, start_utc=start,
        end_utc=start + timedelta(milliseconds=duration_ms),
        media_id=media_id or f"media_{program_id}",
        media_span=TimeInterval(media_start_ms, media_start_ms + duration_ms))


@pytest.fixture(scope="session")
def lexicon():
    return fixture_lexicon()
