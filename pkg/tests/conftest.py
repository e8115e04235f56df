from pathlib import Path

from skillrec.catalog import VideoRecord, write_catalog
from skillrec.skill_mining import SkillRecord
from skillrec.store import Store

FIXTURES = Path(__file__).parent / "fixtures"

DEMO_SKILLS = [
    SkillRecord(name="python", keywords=["python", "python programming"],
                description="Python is a programming language.", score=3.0),
    SkillRecord(name="sql", keywords=["sql"],
                description="SQL queries relational databases.", score=2.0),
]


def _demo_video(vid, skill, level, likes, length, tsim, rating=4.0):
    return VideoRecord(
        id=vid, source="youtube-like", title=f"{skill} video {vid}",
        target_skill=skill, url=f"https://videos.example/{vid}",
        length_s=length, likes=likes, dislikes=5, view_count=1000,
        rating=rating, relevancy_score=1.0, level=level, text_similarity=tsim,
    )


def build_demo_store(root) -> Store:
    """A small but fully populated store: 2 skills x 3 levels x 3 videos."""
    store = Store(root)
    store.initialize()
    store.save_skills(DEMO_SKILLS)
    videos = []
    for skill in ("python", "sql"):
        for level in range(3):
            for i in range(3):
                videos.append(
                    _demo_video(
                        f"{skill}-l{level}-v{i}", skill, level,
                        likes=50 + 40 * i, length=300.0 + 200 * i + 50 * level,
                        tsim=0.2 + 0.3 * i,
                    )
                )
    write_catalog(str(store.catalog_path), videos)
    return store
