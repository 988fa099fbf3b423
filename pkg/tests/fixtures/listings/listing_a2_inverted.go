s, err := f()
if err == nil {
    // main logic
}
return nil, err
