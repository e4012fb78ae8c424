"""Two-part prompt construction for tweet generation.

The system prompt is a run-wide constant (instructions plus a one-shot
example of the metadata-in / tweet-array-out format). The user prompt is
the building's metadata serialized as a single JSON line, so generation is
fully determined by (system prompt, building record).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .records import BuildingRecord

DEFAULT_SYSTEM_PROMPT = """\
Generate tweets as if they were posted by real Twitter users in a specific \
building. Tweets should be sent from the type of building described in the \
'building tag'. Ensure that each tweet reflects a unique perspective or \
experience. Imagine switching personas for each tweet, simulating thoughts \
from different types of users, such as tourists, professionals, or families. \
Consider varying the tone (e.g., humorous, cynical, formal, casual), the \
length (short and concise, or longer and detailed), and the use of mentions \
or hashtags. Highlight varied aspects of the building, such as its \
architecture, services, location, history, or events. You must generate only \
one tweet in each language specified under 'tweet language distribution,' \
written directly in that language.

Example:

{"Building_city": "WashingtonDC",
"Building_tag": "Retail",
"Building_name": "Merlex Auto Group",
"Tweets_language_distribution": ["English", "English"]}

["Bought new rims here at Merlex Auto yesterday, totally transformed my \
ride! @merlexautogroup #AutoCare", "Merlex Auto Group really knows how to \
treat car lovers right. The staff? Super knowledgeable. The selection? If \
you’re in DC and thinking about upgrading your ride, this is the place! \
#CarShopping #DCLuxury"]\
"""


@dataclass(frozen=True)
class PromptBundle:
    building_id: str
    system: str
    user: str


def build_system_prompt(template_path=None) -> str:
    """Return the constant system prompt, or the verbatim contents of an
    override template file."""
    if template_path is None:
        return DEFAULT_SYSTEM_PROMPT
    return Path(template_path).read_text(encoding="utf-8")


def build_user_prompt(record: BuildingRecord) -> str:
    """Serialize the building metadata the generator needs as one JSON line.

    Key order is fixed (city, tag, name, language distribution) so prompts
    are byte-reproducible for a given record.
    """
    payload = {
        "Building_city": record.city,
        "Building_tag": record.tag,
        "Building_name": record.name,
        "Tweets_language_distribution": list(record.tweet_languages),
    }
    return json.dumps(payload, ensure_ascii=False)


def parse_user_prompt(user: str) -> dict:
    """Inverse of build_user_prompt (used for audits and tests)."""
    return json.loads(user)


def build_bundle(record: BuildingRecord, system: str | None = None) -> PromptBundle:
    return PromptBundle(
        building_id=record.building_id,
        system=DEFAULT_SYSTEM_PROMPT if system is None else system,
        user=build_user_prompt(record),
    )
