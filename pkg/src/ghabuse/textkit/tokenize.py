import re

_WORD = re.compile(r"[^\W_]+")


def tokenize(text: str) -> list[str]:
    """Lowercase ``text`` and split it on runs of non-alphanumeric characters.

    Tokens shorter than two characters are dropped. Nothing is stripped
    beforehand, so code-fence contents survive as ordinary tokens.
    """
    return [t for t in _WORD.findall(text.lower()) if len(t) >= 2]
