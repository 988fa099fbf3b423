s, err := f()
if err != nil {
    return nil, err
}
// main logic
