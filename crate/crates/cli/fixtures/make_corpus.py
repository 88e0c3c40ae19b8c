"""Regenerates fixtures/corpus: 5 companies, 50 reviews, 5 logos.

Every logo is exact bands of Red, Silver, Gray and Black plus one color of
its own, so k=5 recovers them exactly and the four shared ids land in every
emotion palette. Reviews are long and mostly neutral in wording, each
carrying a word tied to its company's intended leading emotion.

    python3 make_corpus.py
"""

import csv
import os

from PIL import Image

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "corpus")

SHARED = [((255, 0, 0), 12), ((192, 192, 192), 8), ((128, 128, 128), 8), ((0, 0, 0), 6)]

COMPANIES = [
    # id, name, category, own color, emotion words, typical score
    (1, "Tang", "Food", (255, 255, 0), ["delicious", "enjoyed", "cozy", "comfortable", "cheerful"], 5),
    (2, "Blue Ladle", "Food", (0, 0, 255), ["enjoy", "favorite", "delightful", "content", "excellent"], 4),
    (3, "Grill Corner", "Food", (0, 255, 0), ["annoyed", "ignored", "careless", "frustrating", "complaint"], 2),
    (4, "Noodle Yard", "Food", (128, 0, 0), ["bland", "cold", "dull", "mediocre", "lacking"], 2),
    (5, "Harbor Fry", "Food", (0, 128, 128), ["nervous", "suspicious", "risky", "anxious", "careful"], 2),
]

NEUTRAL = [
    "We came in on a weekday around noon and ordered the lunch set with rice, soup and a drink, {w} overall.",
    "The order was placed at the counter, the receipt was printed and the tray arrived after the usual wait, {w}.",
    "I picked up two boxes for the office on the way back from the station and the team shared them, {w}.",
    "Visited with my parents on Sunday, we took the table near the window and ordered three main dishes, {w}.",
    "The menu lists noodles, rice bowls and fried sides and the prices are written on the board, {w}.",
    "Drove through after work at six and the line had four cars ahead of me at the time, {w}.",
    "Ordered for delivery through the app and the courier handed it over at the building entrance, {w}.",
    "They changed the opening hours this month so the kitchen now starts serving at eleven, {w}.",
]

STRONG = {
    5: ["Delicious food, love it!", "Great staff, great taste, happy!"],
    4: ["Good food and nice staff.", "Really good lunch, would return."],
    2: ["Bad service and rude staff!", "Terrible wait, awful food."],
}


def logo(path, own):
    bands = SHARED + [(own, 6)]
    width = sum(n for _, n in bands)
    img = Image.new("RGB", (width, 24))
    x = 0
    for color, n in bands:
        for dx in range(n):
            for y in range(24):
                img.putpixel((x + dx, y), color)
        x += n
    img.save(path)


def main():
    os.makedirs(os.path.join(OUT, "logos"), exist_ok=True)
    with open(os.path.join(OUT, "companies.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id", "name", "category", "logo_path"])
        for cid, name, cat, own, _, _ in COMPANIES:
            fname = f"company_{cid}.png"
            w.writerow([cid, name, cat, fname])
            logo(os.path.join(OUT, "logos", fname), own)

    rid = 1000
    with open(os.path.join(OUT, "reviews.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id", "company_name", "category", "score", "text", "time"])
        for cid, name, cat, _, words, score in COMPANIES:
            for i in range(10):
                if i < 8:
                    text = NEUTRAL[i].format(w=words[i % len(words)])
                    s = score if i % 3 else max(1, min(5, score - 1 + (i % 2)))
                else:
                    text = STRONG[score][i - 8]
                    s = score
                rid += 1
                day = 1 + (cid * 5 + i) % 28
                w.writerow([rid, name, cat, s, text, f"2023-06-{day:02d} {9 + i:02d}:{(cid * 7) % 60:02d}:{(i * 13) % 60:02d}"])


if __name__ == "__main__":
    main()
