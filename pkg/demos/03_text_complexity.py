"""Text-complexity features: word counts, temporal markers, readability."""

from relatekit.text import text_features

captions = [
    "a dog barking",
    "a dog barking behind a human speech",
    "thunder followed by rain",
    "a bell rings then a dog barks",
    "the aftermath of a storm",
    "an orchestra performing a complicated symphonic arrangement enthusiastically",
]

print(f"{'caption':<70} {'words':>5} {'temporal':>8} {'flesch':>8}")
for text in captions:
    f = text_features(text)
    print(f"{text:<70} {f.word_count:>5} {str(f.has_temporal_preposition):>8} "
          f"{f.flesch_reading_ease:>8.2f}")

print(
    "\nNote: 'aftermath' does not trigger the temporal flag; markers match "
    "whole words only (before / after / then / followed by)."
)
