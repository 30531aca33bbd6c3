"""Writes the bundled code and prose corpora as JSONL ({id, text} per line)."""
import json
import pathlib
import random

PYTHON = [
'''def three_max(l):
    return sorted(l)[-3:]
''',
'''def add(a, b):
    return a + b
''',
'''def subtract(a, b):
    return a - b
''',
'''def multiply(a, b):
    result = a * b
    return result
''',
'''def is_even(n):
    return n % 2 == 0
''',
'''def is_odd(n):
    return n % 2 == 1
''',
'''def factorial(n):
    if n <= 1:
        return 1
    return n * factorial(n - 1)
''',
'''def fibonacci(n):
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a
''',
'''def reverse_string(s):
    return s[::-1]
''',
'''def is_palindrome(s):
    s = s.lower()
    return s == s[::-1]
''',
'''def count_vowels(s):
    count = 0
    for ch in s:
        if ch in "aeiou":
            count += 1
    return count
''',
'''def max_of_list(l):
    result = l[0]
    for x in l:
        if x > result:
            result = x
    return result
''',
'''def min_of_list(l):
    result = l[0]
    for x in l:
        if x < result:
            result = x
    return result
''',
'''def sum_list(l):
    total = 0
    for x in l:
        total += x
    return total
''',
'''def average(l):
    if not l:
        return 0.0
    return sum(l) / len(l)
''',
'''def remove_duplicates(l):
    seen = set()
    result = []
    for x in l:
        if x not in seen:
            seen.add(x)
            result.append(x)
    return result
''',
'''def flatten(nested):
    result = []
    for sub in nested:
        for x in sub:
            result.append(x)
    return result
''',
'''def word_count(text):
    counts = {}
    for word in text.split():
        counts[word] = counts.get(word, 0) + 1
    return counts
''',
'''def is_prime(n):
    if n < 2:
        return False
    for i in range(2, int(n ** 0.5) + 1):
        if n % i == 0:
            return False
    return True
''',
'''def primes_below(n):
    return [i for i in range(2, n) if is_prime(i)]
''',
'''def gcd(a, b):
    while b:
        a, b = b, a % b
    return a
''',
'''def lcm(a, b):
    return a * b // gcd(a, b)
''',
'''def binary_search(l, target):
    lo, hi = 0, len(l) - 1
    while lo <= hi:
        mid = (lo + hi) // 2
        if l[mid] == target:
            return mid
        if l[mid] < target:
            lo = mid + 1
        else:
            hi = mid - 1
    return -1
''',
'''def bubble_sort(l):
    n = len(l)
    for i in range(n):
        for j in range(n - i - 1):
            if l[j] > l[j + 1]:
                l[j], l[j + 1] = l[j + 1], l[j]
    return l
''',
'''def capitalize_words(text):
    return " ".join(word.capitalize() for word in text.split())
''',
'''def count_chars(s):
    counts = {}
    for ch in s:
        counts[ch] = counts.get(ch, 0) + 1
    return counts
''',
'''def merge_dicts(a, b):
    result = dict(a)
    result.update(b)
    return result
''',
'''def chunk_list(l, size):
    return [l[i:i + size] for i in range(0, len(l), size)]
''',
'''def transpose(matrix):
    return [list(row) for row in zip(*matrix)]
''',
'''def dot_product(a, b):
    return sum(x * y for x, y in zip(a, b))
''',
'''def square_list(l):
    return [x * x for x in l]
''',
'''def filter_positive(l):
    return [x for x in l if x > 0]
''',
'''def second_largest(l):
    unique = sorted(set(l))
    if len(unique) < 2:
        return None
    return unique[-2]
''',
'''def count_words(text):
    return len(text.split())
''',
'''def celsius_to_fahrenheit(c):
    return c * 9 / 5 + 32
''',
'''def fahrenheit_to_celsius(f):
    return (f - 32) * 5 / 9
''',
'''def is_anagram(a, b):
    return sorted(a) == sorted(b)
''',
'''def digits_sum(n):
    total = 0
    while n > 0:
        total += n % 10
        n //= 10
    return total
''',
'''def power(base, exp):
    result = 1
    for _ in range(exp):
        result *= base
    return result
''',
'''def rotate_list(l, k):
    if not l:
        return l
    k = k % len(l)
    return l[-k:] + l[:-k]
''',
'''def find_index(l, value):
    for i, x in enumerate(l):
        if x == value:
            return i
    return -1
''',
'''def longest_word(text):
    words = text.split()
    return max(words, key=len) if words else ""
''',
'''def unique_chars(s):
    return len(set(s)) == len(s)
''',
'''def pairwise_sum(l):
    return [l[i] + l[i + 1] for i in range(len(l) - 1)]
''',
'''def matrix_sum(matrix):
    total = 0
    for row in matrix:
        for x in row:
            total += x
    return total
''',
'''def clamp(x, lo, hi):
    return max(lo, min(x, hi))
''',
'''def count_upper(s):
    return sum(1 for ch in s if ch.isupper())
''',
'''def zip_lists(a, b):
    return list(zip(a, b))
''',
'''def running_total(l):
    result = []
    total = 0
    for x in l:
        total += x
        result.append(total)
    return result
''',
'''def last_element(l):
    return l[-1] if l else None
''',
]

MULTILANG = [
'''function add(a, b) {
    return a + b;
}
''',
'''function maxOfArray(arr) {
    let result = arr[0];
    for (let i = 1; i < arr.length; i++) {
        if (arr[i] > result) {
            result = arr[i];
        }
    }
    return result;
}
''',
'''function isEven(n) {
    return n % 2 === 0;
}
''',
'''function reverseString(s) {
    return s.split("").reverse().join("");
}
''',
'''function sumArray(arr) {
    let total = 0;
    for (const x of arr) {
        total += x;
    }
    return total;
}
''',
'''const square = (x) => x * x;
const squares = [1, 2, 3].map(square);
''',
'''function countWords(text) {
    return text.split(" ").filter((w) => w.length > 0).length;
}
''',
'''public class Main {
    public static int add(int a, int b) {
        return a + b;
    }
}
''',
'''public static int maxOfArray(int[] arr) {
    int result = arr[0];
    for (int i = 1; i < arr.length; i++) {
        if (arr[i] > result) {
            result = arr[i];
        }
    }
    return result;
}
''',
'''public static boolean isEven(int n) {
    return n % 2 == 0;
}
''',
'''public static String reverse(String s) {
    return new StringBuilder(s).reverse().toString();
}
''',
'''public static int sumArray(int[] arr) {
    int total = 0;
    for (int x : arr) {
        total += x;
    }
    return total;
}
''',
] + PYTHON[:20]

PROSE = [
"The quick brown fox jumps over the lazy dog near the river bank.",
"Language models read text as a sequence of tokens rather than characters.",
"A tokenizer splits words into smaller pieces that appear often in the training data.",
"When a prompt ends in the middle of a word the model sees an unusual token sequence.",
"Token alignment backtracks a few tokens and regenerates them under a prefix constraint.",
"The prefix constraint keeps only tokens whose bytes agree with the remaining prompt text.",
"A trie over the vocabulary makes this filtering fast even for very large vocabularies.",
"Most prompts need only a handful of constrained steps before free decoding resumes.",
"Evaluation compares the same prompts with and without the alignment step.",
"Edit similarity measures how many character edits separate two strings.",
"Exact match checks whether the generated text equals the reference after trimming spaces.",
"Rouge scores count the longest common subsequence of words between two texts.",
"The river flows quietly past the old mill and into the green valley below.",
"Children played in the park while their parents talked on the wooden benches.",
"A small village sits at the foot of the mountain surrounded by tall pine trees.",
"Every morning the baker opens the shop early and fills the shelves with fresh bread.",
"The library keeps thousands of books about history science and art on its shelves.",
"Rain fell softly on the roof as the family gathered around the warm fire.",
"The train left the station on time and arrived in the city before noon.",
"She wrote a long letter to her friend describing the journey across the sea.",
]


NOUNS = ["items", "values", "numbers", "scores", "names", "words", "prices", "counts",
         "points", "records", "lines", "users", "nodes", "keys", "rows", "tasks"]
VERBS = ["total", "largest", "smallest", "average", "unique", "sorted", "filtered",
         "reversed", "doubled", "squared", "first", "last"]
VARS = ["x", "y", "item", "value", "n", "s", "v", "elem"]

TEMPLATES = [
"""def {verb}_{noun}({arg}):
    result = 0
    for {var} in {arg}:
        result += {var}
    return result
""",
"""def {verb}_{noun}({arg}):
    return [{var} * 2 for {var} in {arg}]
""",
"""def {verb}_{noun}({arg}):
    if not {arg}:
        return None
    return max({arg})
""",
"""def {verb}_{noun}({arg}):
    seen = set()
    for {var} in {arg}:
        if {var} in seen:
            return True
        seen.add({var})
    return False
""",
"""def {verb}_{noun}({arg}, limit):
    result = []
    for {var} in {arg}:
        if {var} > limit:
            result.append({var})
    return result
""",
"""def {verb}_{noun}({arg}):
    count = 0
    for {var} in {arg}:
        if {var} % 2 == 0:
            count += 1
    return count
""",
"""def {verb}_{noun}({arg}):
    return sorted({arg}, reverse=True)[:3]
""",
"""def {verb}_{noun}({arg}):
    total = sum({arg})
    return total / len({arg}) if {arg} else 0.0
""",
"""def {verb}_{noun}({arg}, key):
    groups = {{}}
    for {var} in {arg}:
        groups.setdefault({var}[key], []).append({var})
    return groups
""",
"""def {verb}_{noun}({arg}):
    # keep the order of first appearance
    return list(dict.fromkeys({arg}))
""",
"""class {cls}:
    def __init__(self, {arg}):
        self.{arg} = list({arg})

    def {verb}(self):
        return len(self.{arg})
""",
"""def {verb}_{noun}(text):
    {arg} = text.split()
    return [{var}.lower() for {var} in {arg} if {var}]
""",
]


def synthetic_code(count, seed):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        noun = rng.choice(NOUNS)
        out.append(rng.choice(TEMPLATES).format(
            verb=rng.choice(VERBS), noun=noun, arg=noun, var=rng.choice(VARS),
            cls=noun.capitalize().rstrip("s") + "List"))
    return out


def write(path, texts, prefix):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for i, text in enumerate(texts):
            f.write(json.dumps({"id": f"{prefix}{i:03d}", "text": text}) + "\n")


if __name__ == "__main__":
    here = pathlib.Path(__file__).resolve().parent / "corpus"
    here.mkdir(exist_ok=True)
    write(here / "python_functions.jsonl", PYTHON, "py")
    write(here / "code_multilang.jsonl", MULTILANG, "code")
    write(here / "prose.jsonl", PROSE, "prose")
    write(here / "synthetic_code.jsonl", synthetic_code(400, 1234), "syn")
