from datetime import datetime, timezone

import pytest

from conftest import annotated, make_post, store_of
from misinfo_triage.analytics import (
    TopicNotFoundError,
    entity_cloud,
    timeline,
    topic_distribution,
)
from misinfo_triage.corpus import AnnotatedPost, CorpusStore, Label
from misinfo_triage.entities import EntityType
from misinfo_triage.sentiment import SentimentClass
from misinfo_triage.topics import TopicLexicon

M, NM = Label.MISLEADING, Label.NON_MISLEADING
NEU = SentimentClass.NEUTRAL
VAC, GPE = EntityType.VAC_TYPE, EntityType.GPE


def snapshot_of(posts):
    return store_of(posts).snapshot()


class TestTopicDistribution:
    def test_counts_split_by_label(self):
        snap = snapshot_of(
            [
                annotated("a", M, "Shots", [], NEU),
                annotated("b", NM, "Shots", [], NEU),
                annotated("c", NM, "Shots", [], NEU),
                annotated("d", M, "Myths", [], NEU),
            ]
        )
        rows = topic_distribution(snap)
        by_name = {r.topic: r for r in rows}
        assert by_name["Shots"].misleading == 1
        assert by_name["Shots"].non_misleading == 2
        assert by_name["Shots"].percentage == 75.0
        assert by_name["Myths"].total == 1

    def test_sorted_by_total_descending(self):
        snap = snapshot_of(
            [annotated(f"p{i}", NM, "Big" if i < 3 else "Small", [], NEU) for i in range(5)]
        )
        rows = [r for r in topic_distribution(snap) if r.total > 0]
        assert [r.topic for r in rows] == ["Big", "Small"]

    def test_empty_snapshot(self):
        assert topic_distribution(CorpusStore().snapshot()) == []

    def test_partition_invariant(self):
        posts = [
            annotated(f"p{i}", M if i % 2 else NM, ["A", "B", "C"][i % 3], [], NEU)
            for i in range(11)
        ] + [AnnotatedPost(post=make_post("bare"))]
        snap = snapshot_of(posts)
        rows = topic_distribution(snap)
        assert sum(r.total for r in rows) == len(snap)
        assert sum(r.misleading + r.non_misleading + r.unlabeled for r in rows) == len(snap)

    def test_lexicon_topics_always_present(self):
        lexicon = TopicLexicon.load()
        snap = snapshot_of([annotated("a", M, "Shots", [], NEU)])
        rows = topic_distribution(snap, lexicon)
        names = {r.topic for r in rows}
        assert set(lexicon.all_names()) <= names


class TestEntityCloud:
    def make_snapshot(self):
        return snapshot_of(
            [
                annotated("a", M, "Shots", [("pfizer", VAC)], NEU),
                annotated("b", M, "Shots", [("pfizer", VAC), ("texas", GPE)], NEU),
                annotated("c", NM, "Shots", [("pfizer", VAC)], NEU),
                annotated("d", M, "Myths", [("pfizer", VAC)], NEU),
            ]
        )

    def test_frequency_counted_per_label(self):
        cloud = entity_cloud(self.make_snapshot(), "Shots")
        m = {(e.surface, e.etype): e.count for e in cloud.misleading}
        nm = {(e.surface, e.etype): e.count for e in cloud.non_misleading}
        assert m[("pfizer", "VAC_TYPE")] == 2
        assert m[("texas", "GPE")] == 1
        assert nm[("pfizer", "VAC_TYPE")] == 1

    def test_top_n_limit_and_tie_rule(self):
        snap = snapshot_of(
            [
                annotated("a", M, "Shots", [("zeta", VAC)], NEU),
                annotated("b", M, "Shots", [("alpha", VAC)], NEU),
            ]
        )
        cloud = entity_cloud(snap, "Shots", n=1)
        assert len(cloud.misleading) == 1
        assert cloud.misleading[0].surface == "alpha"  # tie broken lexicographically

    def test_zero_post_topic_empty(self):
        lexicon = TopicLexicon.load()
        cloud = entity_cloud(self.make_snapshot(), "Trials", lexicon=lexicon)
        assert cloud.misleading == () and cloud.non_misleading == ()

    def test_unknown_topic_error(self):
        with pytest.raises(TopicNotFoundError):
            entity_cloud(self.make_snapshot(), "NotATopic")

    def test_all_topics_when_none(self):
        cloud = entity_cloud(self.make_snapshot(), None)
        m = {(e.surface, e.etype): e.count for e in cloud.misleading}
        assert m[("pfizer", "VAC_TYPE")] == 3

    def test_n_validation(self):
        with pytest.raises(ValueError):
            entity_cloud(self.make_snapshot(), None, n=0)


def post_on(pid, label, topic, y, m, d, hour=12):
    ap = annotated(pid, label, topic, [], NEU)
    from dataclasses import replace

    return replace(ap, post=replace(ap.post, timestamp=datetime(y, m, d, hour, tzinfo=timezone.utc)))


class TestTimeline:
    def test_three_consecutive_days(self):
        snap = snapshot_of(
            [post_on(f"p{d}", M, "Shots", 2021, 1, d) for d in (1, 2, 3)]
        )
        series = timeline(snap, "Shots", "day")
        assert len(series.buckets) == 3
        assert all(b.misleading == 1 for b in series.buckets)

    def test_gap_zero_filled(self):
        snap = snapshot_of(
            [post_on("p1", M, "Shots", 2021, 1, 1), post_on("p3", M, "Shots", 2021, 1, 3)]
        )
        series = timeline(snap, "Shots", "day")
        assert len(series.buckets) == 3
        assert series.buckets[1].misleading == 0
        assert series.buckets[1].non_misleading == 0

    def test_conservation(self):
        posts = [
            post_on(f"p{i}", M if i % 2 else NM, "Shots", 2021, 1 + i % 3, 1 + i % 27)
            for i in range(17)
        ]
        snap = snapshot_of(posts)
        series = timeline(snap, "Shots", "day")
        total = sum(b.misleading + b.non_misleading + b.unlabeled for b in series.buckets)
        assert total == len(posts)

    def test_week_buckets_start_monday(self):
        # 2021-01-06 was a Wednesday; its week bucket starts Monday 2021-01-04
        snap = snapshot_of([post_on("p1", M, "Shots", 2021, 1, 6)])
        series = timeline(snap, None, "week")
        assert series.buckets[0].start == datetime(2021, 1, 4, tzinfo=timezone.utc)

    def test_month_buckets(self):
        snap = snapshot_of(
            [post_on("p1", M, "Shots", 2020, 11, 20), post_on("p2", NM, "Shots", 2021, 1, 2)]
        )
        series = timeline(snap, None, "month")
        starts = [b.start for b in series.buckets]
        assert starts == [
            datetime(2020, 11, 1, tzinfo=timezone.utc),
            datetime(2020, 12, 1, tzinfo=timezone.utc),
            datetime(2021, 1, 1, tzinfo=timezone.utc),
        ]

    def test_topic_filter(self):
        snap = snapshot_of(
            [post_on("p1", M, "Shots", 2021, 1, 1), post_on("p2", M, "Myths", 2021, 1, 1)]
        )
        series = timeline(snap, "Shots", "day")
        assert sum(b.misleading for b in series.buckets) == 1

    def test_empty_matching_set(self):
        lexicon = TopicLexicon.load()
        snap = snapshot_of([post_on("p1", M, "Shots", 2021, 1, 1)])
        series = timeline(snap, "Trials", "day", lexicon=lexicon)
        assert series.buckets == ()

    def test_unknown_topic_error(self):
        snap = snapshot_of([post_on("p1", M, "Shots", 2021, 1, 1)])
        with pytest.raises(TopicNotFoundError):
            timeline(snap, "Nope", "day")

    def test_bad_granularity(self):
        snap = snapshot_of([post_on("p1", M, "Shots", 2021, 1, 1)])
        with pytest.raises(ValueError):
            timeline(snap, None, "hourly")

    def test_stability_repeatable(self):
        snap = snapshot_of(
            [post_on(f"p{i}", M, "Shots", 2021, 1, 1 + i) for i in range(5)]
        )
        assert timeline(snap, None, "day") == timeline(snap, None, "day")
        assert topic_distribution(snap) == topic_distribution(snap)
