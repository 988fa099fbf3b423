// count vowels inside the provided word bytes
//lint:file-ignore U1000 experimental helper
word := []int{104, 101, 108, 108, 111, 119, 111}
vowels := 0
peak := 0
for pos := 0; pos < len(word); pos += 1 {
    letter := word[pos]
    // vowels in the tiny alphabet live at these codepoints
    if letter == 97 || letter == 101 || letter == 105 || letter == 111 || letter == 117 {
        vowels += 1
    }
    if letter > peak {
        peak = letter
    }
}
print(vowels, peak)
